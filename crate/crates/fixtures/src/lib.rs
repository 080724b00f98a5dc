//! Test and benchmark inputs: hand-written contracts and seeded pairs of
//! generated contracts with known mutations.

pub mod model;
pub mod mutate;

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use model::{Contract, Names};
pub use mutate::{inject_syntax_error, mutate, Applied, Category};

macro_rules! contract {
    ($name:literal) => {
        ($name, include_str!(concat!("../contracts/", $name, ".sol")))
    };
}

/// The SimpleStorage pair: the original and the reformatted version with
/// `num` renamed to `counter` and the state variable made private.
pub const SIMPLE_STORAGE: &str = include_str!("../contracts/simple_storage.sol");
pub const SIMPLE_STORAGE_MODIFIED: &str = include_str!("../contracts/simple_storage_modified.sol");
/// The original without its `reset` function.
pub const SIMPLE_STORAGE_NO_RESET: &str = include_str!("../contracts/simple_storage_no_reset.sol");

/// Every file under `contracts/`, by stem.
pub const HAND_WRITTEN: &[(&str, &str)] = &[
    contract!("auction"),
    contract!("crowdfund"),
    contract!("escrow"),
    contract!("math_library"),
    contract!("multisig"),
    contract!("registry"),
    contract!("simple_storage"),
    contract!("simple_storage_modified"),
    contract!("simple_storage_no_reset"),
    contract!("token"),
    contract!("voting"),
];

/// Deterministic generator for pair `index` of a set seeded with `seed`.
pub fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index as u64)
}

/// A before/after pair with the mutations that produced it.
#[derive(Clone, Debug)]
pub struct Pair {
    pub id: String,
    pub before: String,
    pub after: String,
    pub category: String,
    pub mutation_count: usize,
    pub applied: Vec<Applied>,
}

/// `count` generated contracts with `functions` functions each.
pub fn generated_contracts(seed: u64, count: usize, functions: usize) -> Vec<String> {
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, i);
            Contract::generate(&mut rng, &mut Names::default(), functions).render()
        })
        .collect()
}

/// One pair per index, each carrying `mutations` mutations of the given
/// categories (drawn at random per mutation) on distinct functions.
pub fn pairs(
    seed: u64,
    count: usize,
    functions: usize,
    categories: &[Category],
    mutations: usize,
) -> Vec<Pair> {
    assert!(!categories.is_empty(), "need at least one category");
    let mut out = Vec::with_capacity(count);
    let mut index = 0;
    while out.len() < count {
        let mut rng = rng_for(seed, index);
        index += 1;
        let mut names = Names::default();
        let base = Contract::generate(&mut rng, &mut names, functions);
        let mut mutated = base.clone();
        let mut touched = BTreeSet::new();
        let mut applied = Vec::new();
        let mut used = BTreeSet::new();
        for _ in 0..mutations {
            let category = categories[rng.gen_range(0..categories.len())];
            if let Some(a) =
                mutate::mutate(&mut mutated, category, &mut rng, &mut names, &mut touched)
            {
                used.insert(category);
                applied.push(a);
            }
        }
        if applied.len() != mutations {
            continue;
        }
        let category = if used.len() == 1 {
            used.first().expect("one").as_str().to_owned()
        } else {
            "mixed".to_owned()
        };
        out.push(Pair {
            id: format!("p{:04}", out.len()),
            before: base.render(),
            after: mutated.render(),
            category,
            mutation_count: mutations,
            applied,
        });
    }
    out
}

/// Single-mutation pairs cycling through every category.
pub fn mutation_corpus(seed: u64, count: usize, functions: usize) -> Vec<Pair> {
    let mut out = Vec::with_capacity(count);
    for (i, category) in Category::ALL.iter().cycle().take(count).enumerate() {
        let mut p = pairs(seed.wrapping_add(i as u64), 1, functions, &[*category], 1)
            .pop()
            .expect("one pair");
        p.id = format!("p{i:04}");
        out.push(p);
    }
    out
}

/// Replaces the after side of `pair` with a copy that fails to parse.
pub fn break_after(pair: &mut Pair, seed: u64) {
    let mut rng = rng_for(seed, 0);
    pair.after = inject_syntax_error(&pair.after, &mut rng);
    pair.category = "syntax_error".to_owned();
}

/// Writes each pair as two files under `dir/pairs/` and a manifest at
/// `dir/manifest.csv` whose paths are relative to `dir`.
pub fn write_corpus(dir: &Path, pairs: &[Pair]) -> io::Result<PathBuf> {
    let files = dir.join("pairs");
    fs::create_dir_all(&files)?;
    let mut manifest = String::from("pairId,before,after,category,mutationCount\n");
    for p in pairs {
        let before = format!("pairs/{}.before.sol", p.id);
        let after = format!("pairs/{}.after.sol", p.id);
        fs::write(dir.join(&before), &p.before)?;
        fs::write(dir.join(&after), &p.after)?;
        manifest.push_str(&format!(
            "{},{before},{after},{},{}\n",
            p.id, p.category, p.mutation_count
        ));
    }
    let path = dir.join("manifest.csv");
    fs::write(&path, manifest)?;
    Ok(path)
}
