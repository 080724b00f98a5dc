//! End-to-end acceptance checks. Runs as a plain binary so that the one
//! PASS/FAIL line per criterion is always shown.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soldiff_cli::{read_reports, Status};
use soldiff_core::{
    apply_edit_script, diff_sources, generate_edit_script, isomorphic, line_diff,
    line_edit_distance, match_trees, serialize, ActionKind, Format, Frontend, MappingStore,
    MatcherConfig, NodeId, NodeSpec, SyntaxTree,
};
use soldiff_fixtures::{Applied, Category};

const BIN: &str = env!("CARGO_BIN_EXE_soldiff");

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("golden SimpleStorage script", golden),
        ("apply soundness over mutated pairs", soundness),
        ("identity diffs are empty", identity),
        ("function move is one action", move_advantage),
        ("rename costs k + 1 updates", rename_propagation),
        ("failure accounting with broken mutants", failure_accounting),
        ("small-instance optimality", small_optimality),
        ("line baseline optimality", line_optimality),
        ("parallel determinism and throughput", parallel_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_text(&e))));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn panic_text(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn words(text: &str, word: &str) -> usize {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|t| *t == word)
        .count()
}

fn golden() -> Result<String, String> {
    let expected: BTreeSet<&str> = [
        r#"<update-node tree="visibility: public [37,43]" label="private"/>"#,
        r#"<update-node tree="identifier: num [44,47]" label="counter"/>"#,
        r#"<update-node tree="identifier: num [98,101]" label="counter"/>"#,
        r#"<update-node tree="identifier: num [159,162]" label="counter"/>"#,
        r#"<update-node tree="identifier: num [242,245]" label="counter"/>"#,
        r#"<update-node tree="identifier: num [292,295]" label="counter"/>"#,
    ]
    .into();

    let start = Instant::now();
    let mut fe = Frontend::solidity();
    let d = diff_sources(
        &mut fe,
        soldiff_fixtures::SIMPLE_STORAGE,
        soldiff_fixtures::SIMPLE_STORAGE_MODIFIED,
        &MatcherConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let xml = serialize(&d.script, Format::Xml);
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;

    let updates: BTreeSet<&str> = xml
        .lines()
        .filter(|l| l.starts_with("<update-node"))
        .collect();
    ensure(updates == expected, || {
        format!("update elements differ:\n{xml}")
    })?;
    let others: Vec<_> = d
        .script
        .actions
        .iter()
        .filter(|a| a.kind() != ActionKind::Update)
        .collect();
    ensure(
        others.iter().all(|a| a.kind() == ActionKind::Insert),
        || format!("non-insert extra actions: {others:?}"),
    )?;

    // The same through the binary.
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../fixtures/contracts");
    let out = Command::new(BIN)
        .arg("diff")
        .arg(dir.join("simple_storage.sol"))
        .arg(dir.join("simple_storage_modified.sol"))
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.success() && stdout.trim_end() == xml, || {
        format!("binary output differs: {stdout}")
    })?;
    Ok(format!(
        "6 updates, {} extra inserts, {elapsed:.2?}",
        others.len()
    ))
}

fn soundness() -> Result<String, String> {
    let mut pairs = soldiff_fixtures::mutation_corpus(101, 240, 10);
    pairs.extend(soldiff_fixtures::pairs(102, 60, 12, &Category::ALL, 3));
    let start = Instant::now();
    let mut fe = Frontend::solidity();
    let cfg = MatcherConfig::default();
    let mut categories = BTreeSet::new();
    for p in &pairs {
        let d = diff_sources(&mut fe, &p.before, &p.after, &cfg)
            .map_err(|e| format!("{}: {e}", p.id))?;
        let out = apply_edit_script(&d.before, &d.script).map_err(|e| format!("{}: {e}", p.id))?;
        ensure(
            isomorphic(&out, out.root(), &d.after, d.after.root()),
            || format!("{} ({:?}) does not rebuild the after tree", p.id, p.applied),
        )?;
        categories.insert(p.category.clone());
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    ensure(categories.len() == Category::ALL.len() + 1, || {
        format!("categories {categories:?}")
    })?;
    Ok(format!(
        "{} pairs over {} categories, 0 failures",
        pairs.len(),
        categories.len()
    ))
}

fn identity() -> Result<String, String> {
    let mut files: Vec<String> = soldiff_fixtures::HAND_WRITTEN
        .iter()
        .map(|(_, s)| s.to_string())
        .collect();
    files.extend(soldiff_fixtures::generated_contracts(103, 50, 4));
    files.extend(soldiff_fixtures::generated_contracts(104, 50, 20));
    let mut fe = Frontend::solidity();
    let cfg = MatcherConfig::default();
    for (i, f) in files.iter().enumerate() {
        let d = diff_sources(&mut fe, f, f, &cfg).map_err(|e| format!("file {i}: {e}"))?;
        ensure(d.script.is_empty(), || {
            format!("file {i}: {:?}", d.script.actions)
        })?;
    }
    Ok(format!("{} files, all distance 0", files.len()))
}

// Lines of the function `name` in `source`, counted from its header to
// the closing brace at the same indentation.
fn function_lines(source: &str, name: &str) -> Option<usize> {
    let lines: Vec<&str> = source.lines().collect();
    let header = format!("    function {name}(");
    let start = lines.iter().position(|l| l.starts_with(&header))?;
    let end = start + lines[start..].iter().position(|l| *l == "    }")?;
    Some(end - start + 1)
}

fn move_advantage() -> Result<String, String> {
    let pairs = soldiff_fixtures::pairs(105, 20, 10, &[Category::MoveFunction], 1);
    let mut fe = Frontend::solidity();
    let cfg = MatcherConfig::default();
    let mut min_ratio = f64::INFINITY;
    for p in &pairs {
        let Applied::MoveFunction { name, .. } = &p.applied[0] else {
            return Err(format!("{}: not a move", p.id));
        };
        let lines = function_lines(&p.before, name).ok_or("moved function not found")?;
        let d = diff_sources(&mut fe, &p.before, &p.after, &cfg).map_err(|e| e.to_string())?;
        let kinds: Vec<ActionKind> = d.script.actions.iter().map(|a| a.kind()).collect();
        ensure(kinds == [ActionKind::Move], || {
            format!("{}: script {:?}", p.id, d.script.actions)
        })?;
        let line = line_edit_distance(&line_diff(&p.before, &p.after));
        ensure(line >= 2 * lines, || {
            format!("{}: line distance {line} for {lines} lines", p.id)
        })?;
        min_ratio = min_ratio.min(line as f64 / lines as f64);
    }
    Ok(format!(
        "20 pairs, distance 1 each, line distance at least {min_ratio:.2}x the moved lines"
    ))
}

fn rename_propagation() -> Result<String, String> {
    let pairs = soldiff_fixtures::pairs(106, 20, 10, &[Category::Rename], 1);
    let mut fe = Frontend::solidity();
    let cfg = MatcherConfig::default();
    let mut ks = Vec::new();
    for p in &pairs {
        let Applied::Rename { from, to, .. } = &p.applied[0] else {
            return Err(format!("{}: not a rename", p.id));
        };
        let k = words(&p.before, from) - 1;
        ensure(
            words(&p.after, to) == k + 1 && words(&p.after, from) == 0,
            || format!("{}: rename of {from} is not clean", p.id),
        )?;
        let d = diff_sources(&mut fe, &p.before, &p.after, &cfg).map_err(|e| e.to_string())?;
        let c = d.script.counts();
        ensure(d.script.len() == k + 1 && c.updates == k + 1, || {
            format!("{}: k = {k}, script {:?}", p.id, d.script.actions)
        })?;
        let line = line_edit_distance(&line_diff(&p.before, &p.after));
        ensure(line > k, || {
            format!("{}: line distance {line} < {}", p.id, k + 1)
        })?;
        ks.push(k);
    }
    Ok(format!(
        "20 pairs, k from {} to {}",
        ks.iter().min().unwrap(),
        ks.iter().max().unwrap()
    ))
}

fn run_corpus_bin(manifest: &Path, out: &Path, jobs: usize) -> Result<(Duration, String), String> {
    let start = Instant::now();
    let o = Command::new(BIN)
        .arg("corpus")
        .arg(manifest)
        .arg("--jobs")
        .arg(jobs.to_string())
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&o.stdout).into_owned();
    ensure(o.status.success(), || {
        format!(
            "corpus exited {:?}: {}",
            o.status,
            String::from_utf8_lossy(&o.stderr)
        )
    })?;
    Ok((elapsed, stdout))
}

fn failure_accounting() -> Result<String, String> {
    let mut pairs = soldiff_fixtures::pairs(107, 200, 10, &Category::ALL, 2);
    let broken = [13, 57, 99, 142, 188];
    for (n, &i) in broken.iter().enumerate() {
        soldiff_fixtures::break_after(&mut pairs[i], n as u64);
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = soldiff_fixtures::write_corpus(dir.path(), &pairs).map_err(|e| e.to_string())?;
    let report = dir.path().join("report.csv");
    let (_, stdout) = run_corpus_bin(&manifest, &report, 4)?;
    let rows = read_reports(std::fs::File::open(&report).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(rows.len() == 200, || format!("{} rows", rows.len()))?;
    let failed: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].is_ok()).collect();
    ensure(failed == broken, || format!("non-ok rows at {failed:?}"))?;
    ensure(
        failed
            .iter()
            .all(|&i| rows[i].status == Status::ParseErrorAfter),
        || "broken rows not reported as parse_error_after".into(),
    )?;
    ensure(stdout.contains("success rate: 97.50%"), || {
        format!("summary:\n{stdout}")
    })?;
    Ok("200 rows, 5 parse_error_after, success rate 97.50%".into())
}

// Small random trees over three kinds and three labels.
fn random_spec(rng: &mut ChaCha8Rng, n: usize) -> NodeSpec {
    let mut parent = vec![0usize; n];
    for (i, p) in parent.iter_mut().enumerate().skip(1) {
        *p = rng.gen_range(0..i);
    }
    let mut specs: Vec<NodeSpec> = (0..n)
        .map(|_| {
            NodeSpec::new(
                *["a", "b", "c"].choose(rng).unwrap(),
                *["", "x", "y"].choose(rng).unwrap(),
            )
        })
        .collect();
    for i in (1..n).rev() {
        let child = std::mem::replace(&mut specs[i], NodeSpec::new("", ""));
        specs[parent[i]].children.insert(0, child);
    }
    specs.swap_remove(0)
}

fn flatten(spec: &NodeSpec, out: &mut Vec<(String, String, usize)>, depth: usize) {
    out.push((spec.kind.clone(), spec.label.clone(), depth));
    for c in &spec.children {
        flatten(c, out, depth + 1);
    }
}

fn unflatten(nodes: &[(String, String, usize)]) -> NodeSpec {
    fn go(nodes: &[(String, String, usize)], i: &mut usize) -> NodeSpec {
        let (kind, label, depth) = &nodes[*i];
        let mut spec = NodeSpec::new(kind.clone(), label.clone());
        *i += 1;
        while *i < nodes.len() && nodes[*i].2 == depth + 1 {
            spec.children.push(go(nodes, i));
        }
        spec
    }
    go(nodes, &mut 0)
}

// Relabels, reorders, adds leaves and splices out nodes.
fn perturb(rng: &mut ChaCha8Rng, spec: &NodeSpec, max: usize) -> NodeSpec {
    let mut spec = spec.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let mut nodes = Vec::new();
        flatten(&spec, &mut nodes, 0);
        let i = rng.gen_range(0..nodes.len());
        match rng.gen_range(0..4) {
            0 => nodes[i].1 = ["", "x", "y"].choose(rng).unwrap().to_string(),
            1 if nodes.len() < max => {
                let depth = nodes[i].2 + 1;
                nodes.insert(
                    i + 1,
                    (
                        ["a", "b", "c"].choose(rng).unwrap().to_string(),
                        "x".into(),
                        depth,
                    ),
                );
            }
            2 if i > 0 => {
                let depth = nodes[i].2;
                nodes.remove(i);
                let mut j = i;
                while j < nodes.len() && nodes[j].2 > depth {
                    nodes[j].2 -= 1;
                    j += 1;
                }
            }
            _ => {}
        }
        spec = unflatten(&nodes);
        if rng.gen_bool(0.3) {
            spec.children.shuffle(rng);
        }
    }
    spec
}

fn lis(seq: &[usize]) -> usize {
    let mut best = vec![1; seq.len()];
    for i in 0..seq.len() {
        for j in 0..i {
            if seq[j] < seq[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

// Script length a mapping induces: a delete per unmapped source node, an
// insert per maximal unmapped destination subtree, an update per relabelled
// pair, a move per pair whose parents are not partners, and a move per
// sibling that has to leave the longest order-preserving run.
fn mapping_cost(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    s2d: &[Option<usize>],
    d2s: &[Option<usize>],
) -> usize {
    let id = |i: usize| NodeId(i as u32);
    let mut cost = 0;
    for s in 0..src.len() {
        let Some(d) = s2d[s] else {
            cost += 1;
            continue;
        };
        cost += usize::from(src.label(id(s)) != dst.label(id(d)));
        let same_parent = match (src.parent(id(s)), dst.parent(id(d))) {
            (None, None) => true,
            (Some(p), Some(q)) => s2d[p.index()] == Some(q.index()),
            _ => false,
        };
        cost += usize::from(!same_parent);
        let dst_children = dst.children(id(d));
        let order: Vec<usize> = src
            .children(id(s))
            .iter()
            .filter_map(|c| s2d[c.index()])
            .filter_map(|x| dst_children.iter().position(|c| c.index() == x))
            .collect();
        cost += order.len() - lis(&order);
    }
    for d in 0..dst.len() {
        if d2s[d].is_none() && dst.parent(id(d)).map_or(true, |q| d2s[q.index()].is_some()) {
            cost += 1;
        }
    }
    cost
}

fn brute_force(src: &SyntaxTree, dst: &SyntaxTree) -> (usize, Vec<Option<usize>>) {
    fn go(
        src: &SyntaxTree,
        dst: &SyntaxTree,
        s: usize,
        s2d: &mut Vec<Option<usize>>,
        d2s: &mut Vec<Option<usize>>,
        best: &mut (usize, Vec<Option<usize>>),
    ) {
        if s == src.len() {
            let c = mapping_cost(src, dst, s2d, d2s);
            if c < best.0 {
                *best = (c, s2d.clone());
            }
            return;
        }
        go(src, dst, s + 1, s2d, d2s, best);
        for d in 0..dst.len() {
            if d2s[d].is_none() && src.kind(NodeId(s as u32)) == dst.kind(NodeId(d as u32)) {
                s2d[s] = Some(d);
                d2s[d] = Some(s);
                go(src, dst, s + 1, s2d, d2s, best);
                s2d[s] = None;
                d2s[d] = None;
            }
        }
    }
    let mut best = (usize::MAX, Vec::new());
    go(
        src,
        dst,
        0,
        &mut vec![None; src.len()],
        &mut vec![None; dst.len()],
        &mut best,
    );
    best
}

fn small_optimality() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let cfg = MatcherConfig::default();
    let start = Instant::now();
    let mut optimal_nonzero = 0;
    for i in 0..500 {
        let n = rng.gen_range(1..=8);
        let a = random_spec(&mut rng, n);
        let b = if rng.gen_bool(0.6) {
            perturb(&mut rng, &a, 8)
        } else {
            let n = rng.gen_range(1..=8);
            random_spec(&mut rng, n)
        };
        let src = SyntaxTree::from_spec("", a);
        let dst = SyntaxTree::from_spec("", b);
        let (optimum, witness) = brute_force(&src, &dst);

        let pairs = witness
            .iter()
            .enumerate()
            .filter_map(|(s, d)| d.map(|d| (NodeId(s as u32), NodeId(d as u32))));
        let m = MappingStore::from_pairs(src.len(), dst.len(), pairs).map_err(|e| e.to_string())?;
        let replay = generate_edit_script(&src, &dst, &m).map_err(|e| e.to_string())?;
        ensure(replay.len() == optimum, || {
            format!(
                "pair {i}: oracle cost {optimum} but its mapping scripts to {}",
                replay.len()
            )
        })?;

        let got = generate_edit_script(&src, &dst, &match_trees(&src, &dst, &cfg))
            .map_err(|e| e.to_string())?;
        ensure(got.len() == optimum, || {
            format!(
                "pair {i}: script {} vs optimum {optimum}\n{}\n{}",
                got.len(),
                src.dump(),
                dst.dump()
            )
        })?;
        optimal_nonzero += usize::from(optimum > 0);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "500 pairs ({optimal_nonzero} with nonzero optimum), 0 excess"
    ))
}

fn lcs_distance(a: &str, b: &str) -> usize {
    let x: Vec<&str> = a.split_inclusive('\n').collect();
    let y: Vec<&str> = b.split_inclusive('\n').collect();
    let mut t = vec![vec![0usize; y.len() + 1]; x.len() + 1];
    for i in 1..=x.len() {
        for j in 1..=y.len() {
            t[i][j] = if x[i - 1] == y[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    x.len() + y.len() - 2 * t[x.len()][y.len()]
}

fn random_lines(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    (0..n)
        .map(|_| format!("stmt{};\n", rng.gen_range(0..15)))
        .collect()
}

fn line_optimality() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut total = 0;
    for i in 0..200 {
        let n = rng.gen_range(0..=200);
        let a = random_lines(&mut rng, n);
        let b = if rng.gen_bool(0.5) {
            let mut b = a.clone();
            for _ in 0..rng.gen_range(0..20) {
                let at = rng.gen_range(0..=b.len());
                match rng.gen_range(0..3) {
                    0 if at < b.len() => {
                        b.remove(at);
                    }
                    1 if at < b.len() => b[at] = format!("changed{at};\n"),
                    _ if b.len() < 200 => b.insert(at, format!("new{at};\n")),
                    _ => {}
                }
            }
            b
        } else {
            let m = rng.gen_range(0..=200);
            random_lines(&mut rng, m)
        };
        let (a, b) = (a.concat(), b.concat());
        let want = lcs_distance(&a, &b);
        let got = line_edit_distance(&line_diff(&a, &b));
        ensure(got == want, || format!("pair {i}: {got} vs oracle {want}"))?;
        total += got;
    }
    Ok(format!(
        "200 pairs, all equal to the LCS oracle (total distance {total})"
    ))
}

fn parallel_determinism() -> Result<String, String> {
    let pairs = soldiff_fixtures::pairs(110, 1000, 30, &Category::ALL, 3);
    let mean_lines = pairs
        .iter()
        .map(|p| p.before.lines().count())
        .sum::<usize>()
        / pairs.len();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = soldiff_fixtures::write_corpus(dir.path(), &pairs).map_err(|e| e.to_string())?;
    let (one, two) = (dir.path().join("jobs1.csv"), dir.path().join("jobs8.csv"));
    let (t1, _) = run_corpus_bin(&manifest, &one, 1)?;
    let (t8, _) = run_corpus_bin(&manifest, &two, 8)?;
    let a = std::fs::read(&one).map_err(|e| e.to_string())?;
    let b = std::fs::read(&two).map_err(|e| e.to_string())?;
    ensure(a == b, || {
        "reports differ between --jobs 1 and --jobs 8".into()
    })?;
    let rows = read_reports(&a[..]).map_err(|e| e.to_string())?;
    ensure(rows.len() == 1000 && rows.iter().all(|r| r.is_ok()), || {
        "not all rows ok".into()
    })?;
    ensure(t8 < Duration::from_secs(120), || {
        format!("--jobs 8 took {t8:?}")
    })?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    Ok(format!(
        "1000 pairs of ~{mean_lines} lines, identical CSV, --jobs 1 {:.1}s, --jobs 8 {:.1}s on {cores} core(s)",
        t1.as_secs_f64(),
        t8.as_secs_f64()
    ))
}
