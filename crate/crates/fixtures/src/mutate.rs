use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{literals_mut, operators_mut, rename_in_stmt, render_function, Contract, Names};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Rename,
    Literal,
    Operator,
    InsertFunction,
    DeleteFunction,
    MoveFunction,
    InsertStatement,
    DeleteStatement,
}

impl Category {
    pub const ALL: [Category; 8] = [
        Category::Rename,
        Category::Literal,
        Category::Operator,
        Category::InsertFunction,
        Category::DeleteFunction,
        Category::MoveFunction,
        Category::InsertStatement,
        Category::DeleteStatement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Rename => "rename",
            Category::Literal => "literal",
            Category::Operator => "operator",
            Category::InsertFunction => "insert_function",
            Category::DeleteFunction => "delete_function",
            Category::MoveFunction => "move_function",
            Category::InsertStatement => "insert_statement",
            Category::DeleteStatement => "delete_statement",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a mutation did, with enough detail to predict its diff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Applied {
    Rename {
        from: String,
        to: String,
        references: usize,
    },
    Literal {
        function: String,
        old: u64,
        new: u64,
    },
    Operator {
        function: String,
        old: &'static str,
        new: &'static str,
    },
    InsertFunction {
        name: String,
    },
    DeleteFunction {
        name: String,
    },
    MoveFunction {
        name: String,
        from: usize,
        to: usize,
        lines: usize,
    },
    InsertStatement {
        function: String,
    },
    DeleteStatement {
        function: String,
    },
}

/// Applies one mutation of `category`, avoiding functions named in
/// `touched` and adding the function it changes. Returns `None` when the
/// contract offers no place for it.
pub fn mutate(
    c: &mut Contract,
    category: Category,
    rng: &mut impl Rng,
    names: &mut Names,
    touched: &mut BTreeSet<String>,
) -> Option<Applied> {
    match category {
        Category::Rename => {
            let candidates: Vec<usize> = (0..c.state.len())
                .filter(|&i| c.references(&c.state[i].name) > 0)
                .collect();
            let &i = candidates.choose(rng)?;
            let from = c.state[i].name.clone();
            let to = names.fresh(rng, "r", &["renamed"]);
            let references = c.references(&from);
            c.state[i].name = to.clone();
            for f in &mut c.functions {
                for s in &mut f.body {
                    rename_in_stmt(s, &from, &to);
                }
            }
            Some(Applied::Rename {
                from,
                to,
                references,
            })
        }
        Category::Literal => {
            let i = pick_function(c, rng, touched, |f| {
                !literals_mut(&mut f.body.clone()).is_empty()
            })?;
            let f = &mut c.functions[i];
            let mut lits = literals_mut(&mut f.body);
            let slot = lits.choose_mut(rng)?;
            let old = **slot;
            let new = loop {
                let v = rng.gen_range(1..100_000);
                if v != old {
                    break v;
                }
            };
            **slot = new;
            touched.insert(f.name.clone());
            Some(Applied::Literal {
                function: f.name.clone(),
                old,
                new,
            })
        }
        Category::Operator => {
            let i = pick_function(c, rng, touched, |f| {
                !operators_mut(&mut f.body.clone()).is_empty()
            })?;
            let f = &mut c.functions[i];
            let mut ops = operators_mut(&mut f.body);
            let slot = ops.choose_mut(rng)?;
            let old = **slot;
            **slot = old.swapped();
            touched.insert(f.name.clone());
            Some(Applied::Operator {
                function: f.name.clone(),
                old: old.symbol(),
                new: old.swapped().symbol(),
            })
        }
        Category::InsertFunction => {
            let f = c.random_function(rng, names);
            let at = rng.gen_range(0..=c.functions.len());
            let name = f.name.clone();
            touched.insert(name.clone());
            c.functions.insert(at, f);
            Some(Applied::InsertFunction { name })
        }
        Category::DeleteFunction => {
            if c.functions.len() < 2 {
                return None;
            }
            let i = pick_function(c, rng, touched, |_| true)?;
            let f = c.functions.remove(i);
            touched.insert(f.name.clone());
            Some(Applied::DeleteFunction { name: f.name })
        }
        Category::MoveFunction => move_function(c, rng, touched),
        Category::InsertStatement => {
            let i = pick_function(c, rng, touched, |_| true)?;
            let donor = c.random_function(rng, names);
            let f = &mut c.functions[i];
            let stmt = donor
                .body
                .into_iter()
                .find(|s| !matches!(s, crate::model::Stmt::Return(_)))?;
            let limit = f.body.len() - usize::from(f.returns);
            let at = rng.gen_range(0..=limit);
            f.body.insert(at, stmt);
            touched.insert(f.name.clone());
            Some(Applied::InsertStatement {
                function: f.name.clone(),
            })
        }
        Category::DeleteStatement => {
            let i = pick_function(c, rng, touched, |f| {
                f.body.len() - usize::from(f.returns) > 1
            })?;
            let f = &mut c.functions[i];
            let limit = f.body.len() - usize::from(f.returns);
            let at = rng.gen_range(0..limit);
            f.body.remove(at);
            touched.insert(f.name.clone());
            Some(Applied::DeleteStatement {
                function: f.name.clone(),
            })
        }
    }
}

fn pick_function(
    c: &Contract,
    rng: &mut impl Rng,
    touched: &BTreeSet<String>,
    ok: impl Fn(&crate::model::Function) -> bool,
) -> Option<usize> {
    let candidates: Vec<usize> = (0..c.functions.len())
        .filter(|&i| !touched.contains(&c.functions[i].name) && ok(&c.functions[i]))
        .collect();
    candidates.choose(rng).copied()
}

// Moves a function past neighbours spanning at least twice its own line
// count, so the line diff cannot get away with re-adding the neighbours.
fn move_function(
    c: &mut Contract,
    rng: &mut impl Rng,
    touched: &mut BTreeSet<String>,
) -> Option<Applied> {
    let lines: Vec<usize> = c
        .functions
        .iter()
        .map(|f| render_function(f).lines().count() + 1)
        .collect();
    let mut options = Vec::new();
    for from in 0..c.functions.len() {
        if touched.contains(&c.functions[from].name) {
            continue;
        }
        for to in 0..c.functions.len() {
            let jumped: usize = if to > from {
                lines[from + 1..=to].iter().sum()
            } else {
                lines[to..from].iter().sum()
            };
            if to != from && jumped >= 2 * lines[from] {
                options.push((from, to));
            }
        }
    }
    let &(from, to) = options.choose(rng)?;
    let f = c.functions.remove(from);
    let name = f.name.clone();
    let lines = render_function(&f).lines().count();
    c.functions.insert(to, f);
    touched.insert(name.clone());
    Some(Applied::MoveFunction {
        name,
        from,
        to,
        lines,
    })
}

/// Breaks a random function header of `source` so it no longer parses.
pub fn inject_syntax_error(source: &str, rng: &mut impl Rng) -> String {
    let headers: Vec<usize> = source.match_indices("function ").map(|(i, _)| i).collect();
    let Some(&at) = headers.choose(rng) else {
        return format!("{source}\ncontract {{");
    };
    let open = at
        + source[at..]
            .find('(')
            .expect("function header has a parameter list");
    let mut out = String::with_capacity(source.len() + 1);
    out.push_str(&source[..=open]);
    out.push_str("uint256 (");
    out.push_str(&source[open + 1..]);
    out
}
