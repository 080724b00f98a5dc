//! A small contract model that renders to valid Solidity and can be mutated
//! with a known effect on the syntax tree.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Gt,
    Lt,
    Ge,
    Le,
    Ne,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Gt => ">",
            BinOp::Lt => "<",
            BinOp::Ge => ">=",
            BinOp::Le => "<=",
            BinOp::Ne => "!=",
        }
    }

    pub fn swapped(self) -> BinOp {
        match self {
            BinOp::Add => BinOp::Sub,
            BinOp::Sub => BinOp::Add,
            BinOp::Mul => BinOp::Add,
            BinOp::Gt => BinOp::Lt,
            BinOp::Lt => BinOp::Gt,
            BinOp::Ge => BinOp::Le,
            BinOp::Le => BinOp::Ge,
            BinOp::Ne => BinOp::Gt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Num(u64),
    Bin(Box<Expr>, BinOp, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
}

impl AssignOp {
    fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Local {
        name: String,
        value: Expr,
    },
    Assign {
        target: String,
        op: AssignOp,
        value: Expr,
    },
    Require {
        cond: Expr,
        message: String,
    },
    If {
        cond: Expr,
        body: Vec<Stmt>,
    },
    Return(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVar {
    pub name: String,
    pub public: bool,
    pub init: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Function {
    pub name: String,
    pub params: Vec<String>,
    pub external: bool,
    pub returns: bool,
    pub body: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contract {
    pub name: String,
    pub state: Vec<StateVar>,
    pub functions: Vec<Function>,
}

const WORDS: &[&str] = &[
    "balance", "supply", "reserve", "limit", "price", "total", "count", "fee", "rate", "stake",
    "reward", "debt", "quota", "bonus", "nonce", "epoch", "weight", "share", "cap", "floor",
];

const VERBS: &[&str] = &[
    "update", "apply", "settle", "adjust", "compute", "record", "refresh", "accrue", "sync",
    "charge", "release", "rebase", "credit", "debit", "audit",
];

/// Hands out identifiers that never repeat within one contract.
#[derive(Clone, Debug, Default)]
pub struct Names {
    next: usize,
}

impl Names {
    pub fn fresh(&mut self, rng: &mut impl Rng, prefix: &str, words: &[&str]) -> String {
        self.next += 1;
        format!(
            "{prefix}{}{}",
            words.choose(rng).expect("non-empty"),
            self.next
        )
    }

    fn var(&mut self, rng: &mut impl Rng, prefix: &str) -> String {
        self.fresh(rng, prefix, WORDS)
    }
}

impl Contract {
    /// Random contract with `functions` functions; about ten lines each.
    pub fn generate(rng: &mut impl Rng, names: &mut Names, functions: usize) -> Contract {
        let state_count = (functions / 2).clamp(3, 16);
        let state: Vec<StateVar> = (0..state_count)
            .map(|_| StateVar {
                name: names.var(rng, "s"),
                public: rng.gen_bool(0.5),
                init: rng.gen_bool(0.4).then(|| rng.gen_range(1..1000)),
            })
            .collect();
        let name = format!("Vault{}", rng.gen_range(100..1000));
        let mut c = Contract {
            name,
            state,
            functions: Vec::new(),
        };
        for _ in 0..functions {
            let f = c.random_function(rng, names);
            c.functions.push(f);
        }
        c
    }

    pub fn state_names(&self) -> Vec<String> {
        self.state.iter().map(|s| s.name.clone()).collect()
    }

    pub fn random_function(&self, rng: &mut impl Rng, names: &mut Names) -> Function {
        let params: Vec<String> = (0..rng.gen_range(1..=3))
            .map(|_| names.var(rng, "p"))
            .collect();
        let returns = rng.gen_bool(0.5);
        let mut scope: Vec<String> = params.clone();
        scope.extend(self.state_names());
        let state = self.state_names();
        let mut body = Vec::new();
        for _ in 0..rng.gen_range(3..=6) {
            body.push(random_stmt(rng, names, &mut scope, &state, 0));
        }
        if returns {
            body.push(Stmt::Return(random_expr(rng, &scope, 2)));
        }
        Function {
            name: names.fresh(rng, "", VERBS),
            params,
            external: rng.gen_bool(0.3),
            returns,
            body,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::from("// SPDX-License-Identifier: MIT\npragma solidity ^0.8.0;\n\n");
        let _ = writeln!(out, "contract {} {{", self.name);
        for s in &self.state {
            let vis = if s.public { "public" } else { "internal" };
            match s.init {
                Some(v) => {
                    let _ = writeln!(out, "    uint256 {vis} {} = {v};", s.name);
                }
                None => {
                    let _ = writeln!(out, "    uint256 {vis} {};", s.name);
                }
            }
        }
        for f in &self.functions {
            out.push('\n');
            out.push_str(&render_function(f));
        }
        out.push_str("}\n");
        out
    }

    /// Identifier occurrences of `name` outside its declaration.
    pub fn references(&self, name: &str) -> usize {
        self.functions
            .iter()
            .flat_map(|f| f.body.iter())
            .map(|s| stmt_refs(s, name))
            .sum()
    }
}

pub fn render_function(f: &Function) -> String {
    let mut out = String::new();
    let params: Vec<String> = f.params.iter().map(|p| format!("uint256 {p}")).collect();
    let vis = if f.external { "external" } else { "public" };
    let ret = if f.returns { " returns (uint256)" } else { "" };
    let _ = writeln!(
        out,
        "    function {}({}) {vis}{ret} {{",
        f.name,
        params.join(", ")
    );
    for s in &f.body {
        render_stmt(&mut out, s, 2);
    }
    out.push_str("    }\n");
    out
}

fn render_stmt(out: &mut String, s: &Stmt, depth: usize) {
    let pad = "    ".repeat(depth);
    match s {
        Stmt::Local { name, value } => {
            let _ = writeln!(out, "{pad}uint256 {name} = {};", render_expr(value));
        }
        Stmt::Assign { target, op, value } => {
            let _ = writeln!(out, "{pad}{target} {} {};", op.symbol(), render_expr(value));
        }
        Stmt::Require { cond, message } => {
            let _ = writeln!(out, "{pad}require({}, \"{message}\");", render_expr(cond));
        }
        Stmt::If { cond, body } => {
            let _ = writeln!(out, "{pad}if ({}) {{", render_expr(cond));
            for inner in body {
                render_stmt(out, inner, depth + 1);
            }
            let _ = writeln!(out, "{pad}}}");
        }
        Stmt::Return(e) => {
            let _ = writeln!(out, "{pad}return {};", render_expr(e));
        }
    }
}

pub fn render_expr(e: &Expr) -> String {
    match e {
        Expr::Var(v) => v.clone(),
        Expr::Num(n) => n.to_string(),
        Expr::Bin(a, op, b) => {
            let wrap = |x: &Expr| match x {
                Expr::Bin(..) => format!("({})", render_expr(x)),
                _ => render_expr(x),
            };
            format!("{} {} {}", wrap(a), op.symbol(), wrap(b))
        }
    }
}

// Each statement names any variable at most once, so a rename changes at
// most one identifier per statement line.
fn random_stmt(
    rng: &mut impl Rng,
    names: &mut Names,
    scope: &mut Vec<String>,
    state: &[String],
    depth: usize,
) -> Stmt {
    match rng.gen_range(0..if depth == 0 { 5 } else { 3 }) {
        0 => {
            let target = state.choose(rng).expect("state").clone();
            let avoid = [target.clone()];
            let value = random_expr_avoiding(rng, scope, &avoid, 2);
            let op = *[AssignOp::Set, AssignOp::Add, AssignOp::Sub]
                .choose(rng)
                .expect("ops");
            Stmt::Assign { target, op, value }
        }
        1 => {
            let cond = random_cond(rng, scope);
            Stmt::Require {
                cond,
                message: format!("check {}", rng.gen_range(1..10_000)),
            }
        }
        2 => {
            let target = state.choose(rng).expect("state").clone();
            Stmt::Assign {
                target,
                op: AssignOp::Add,
                value: Expr::Num(rng.gen_range(1..100)),
            }
        }
        3 => {
            let name = names.var(rng, "l");
            let value = random_expr(rng, scope, 2);
            scope.push(name.clone());
            Stmt::Local { name, value }
        }
        _ => {
            let cond = random_cond(rng, scope);
            let mut inner_scope = scope.clone();
            let body = (0..rng.gen_range(1..=2))
                .map(|_| random_stmt(rng, names, &mut inner_scope, state, depth + 1))
                .collect();
            Stmt::If { cond, body }
        }
    }
}

fn random_cond(rng: &mut impl Rng, scope: &[String]) -> Expr {
    let v = scope.choose(rng).expect("scope").clone();
    let op = *[BinOp::Gt, BinOp::Lt, BinOp::Ge, BinOp::Le, BinOp::Ne]
        .choose(rng)
        .expect("ops");
    Expr::Bin(
        Box::new(Expr::Var(v)),
        op,
        Box::new(Expr::Num(rng.gen_range(0..500))),
    )
}

fn random_expr(rng: &mut impl Rng, scope: &[String], budget: usize) -> Expr {
    random_expr_avoiding(rng, scope, &[], budget)
}

fn random_expr_avoiding(
    rng: &mut impl Rng,
    scope: &[String],
    avoid: &[String],
    budget: usize,
) -> Expr {
    let pool: Vec<&String> = scope.iter().filter(|v| !avoid.contains(v)).collect();
    let mut used: Vec<String> = avoid.to_vec();
    build_expr(rng, &pool, &mut used, budget)
}

fn build_expr(rng: &mut impl Rng, pool: &[&String], used: &mut Vec<String>, budget: usize) -> Expr {
    if budget == 0 || rng.gen_bool(0.35) {
        let fresh: Vec<&&String> = pool.iter().filter(|v| !used.contains(v)).collect();
        return match fresh.choose(rng) {
            Some(v) if rng.gen_bool(0.6) => {
                used.push((**v).clone());
                Expr::Var((**v).clone())
            }
            _ => Expr::Num(rng.gen_range(1..1000)),
        };
    }
    let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul]
        .choose(rng)
        .expect("ops");
    let a = build_expr(rng, pool, used, budget - 1);
    let b = build_expr(rng, pool, used, budget - 1);
    Expr::Bin(Box::new(a), op, Box::new(b))
}

fn expr_refs(e: &Expr, name: &str) -> usize {
    match e {
        Expr::Var(v) => usize::from(v == name),
        Expr::Num(_) => 0,
        Expr::Bin(a, _, b) => expr_refs(a, name) + expr_refs(b, name),
    }
}

fn stmt_refs(s: &Stmt, name: &str) -> usize {
    match s {
        Stmt::Local { value, .. } => expr_refs(value, name),
        Stmt::Assign { target, value, .. } => usize::from(target == name) + expr_refs(value, name),
        Stmt::Require { cond, .. } => expr_refs(cond, name),
        Stmt::If { cond, body } => {
            expr_refs(cond, name) + body.iter().map(|s| stmt_refs(s, name)).sum::<usize>()
        }
        Stmt::Return(e) => expr_refs(e, name),
    }
}

pub(crate) fn rename_in_expr(e: &mut Expr, from: &str, to: &str) {
    match e {
        Expr::Var(v) if v == from => *v = to.to_owned(),
        Expr::Bin(a, _, b) => {
            rename_in_expr(a, from, to);
            rename_in_expr(b, from, to);
        }
        _ => {}
    }
}

pub(crate) fn rename_in_stmt(s: &mut Stmt, from: &str, to: &str) {
    match s {
        Stmt::Local { value, .. } | Stmt::Return(value) => rename_in_expr(value, from, to),
        Stmt::Assign { target, value, .. } => {
            if target == from {
                *target = to.to_owned();
            }
            rename_in_expr(value, from, to);
        }
        Stmt::Require { cond, .. } => rename_in_expr(cond, from, to),
        Stmt::If { cond, body } => {
            rename_in_expr(cond, from, to);
            for inner in body {
                rename_in_stmt(inner, from, to);
            }
        }
    }
}

/// Mutable references to every numeric literal in a statement list.
pub(crate) fn literals_mut(body: &mut [Stmt]) -> Vec<&mut u64> {
    fn expr<'a>(e: &'a mut Expr, out: &mut Vec<&'a mut u64>) {
        match e {
            Expr::Num(n) => out.push(n),
            Expr::Bin(a, _, b) => {
                expr(a, out);
                expr(b, out);
            }
            Expr::Var(_) => {}
        }
    }
    fn stmt<'a>(s: &'a mut Stmt, out: &mut Vec<&'a mut u64>) {
        match s {
            Stmt::Local { value, .. } | Stmt::Assign { value, .. } | Stmt::Return(value) => {
                expr(value, out)
            }
            Stmt::Require { cond, .. } => expr(cond, out),
            Stmt::If { cond, body } => {
                expr(cond, out);
                for inner in body {
                    stmt(inner, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    for s in body {
        stmt(s, &mut out);
    }
    out
}

/// Mutable references to every binary operator in a statement list.
pub(crate) fn operators_mut(body: &mut [Stmt]) -> Vec<&mut BinOp> {
    fn expr<'a>(e: &'a mut Expr, out: &mut Vec<&'a mut BinOp>) {
        if let Expr::Bin(a, op, b) = e {
            out.push(op);
            expr(a, out);
            expr(b, out);
        }
    }
    fn stmt<'a>(s: &'a mut Stmt, out: &mut Vec<&'a mut BinOp>) {
        match s {
            Stmt::Local { value, .. } | Stmt::Assign { value, .. } | Stmt::Return(value) => {
                expr(value, out)
            }
            Stmt::Require { cond, .. } => expr(cond, out),
            Stmt::If { cond, body } => {
                expr(cond, out);
                for inner in body {
                    stmt(inner, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    for s in body {
        stmt(s, &mut out);
    }
    out
}
