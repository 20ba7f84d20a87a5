//! Deterministic builders for the standard small algebras.
//!
//! Keys are parsed from a small grammar: a factor is `name` or `name(args)`,
//! and factors are joined by `*` into direct products, e.g.
//! `cyclic(2)*heisenberg(3)`.

use crate::algebra::{direct_product, FiniteMla, MAX_ORDER};
use crate::error::{MlaError, Result};

/// Keys listed by `mlakit catalog list`; also the population the acceptance
/// suite runs the axiom checks over.
pub const STANDARD_KEYS: &[&str] = &[
    "trivial",
    "cyclic(2)",
    "cyclic(3)",
    "cyclic(4)",
    "cyclic(5)",
    "cyclic(6)",
    "cyclic(8)",
    "klein4",
    "dihedral(3)",
    "dihedral(4)",
    "sym(3)",
    "lie_ring_zero(2,2,2)",
    "lie_ring_zero(2,4)",
    "heisenberg(2)",
    "heisenberg(3)",
    "commutator(sym(3))",
    "commutator(dihedral(4))",
    "cyclic(2)*cyclic(2)",
    "cyclic(2)*sym(3)",
    "cyclic(2)*heisenberg(2)",
    "cyclic(2)*heisenberg(3)",
];

/// Builds the algebra named by `key`.
pub fn build(key: &str) -> Result<FiniteMla> {
    let key = key.trim();
    let factors = split_top_level(key, '*');
    let mut acc: Option<FiniteMla> = None;
    for f in factors {
        let next = build_factor(f.trim())?;
        acc = Some(match acc {
            None => next,
            Some(prev) => direct_product(&prev, &next, MAX_ORDER).map_err(|_| MlaError::SizeBound {
                what: "catalog product",
                size: prev.order() * next.order(),
                limit: MAX_ORDER,
            })?,
        });
    }
    let algebra = acc.ok_or_else(|| MlaError::UnknownKey(key.to_string()))?;
    Ok(algebra.with_name(key))
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_args(key: &str, args: &str) -> Result<Vec<usize>> {
    if args.trim().is_empty() {
        return Ok(Vec::new());
    }
    args.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| MlaError::UnknownKey(key.to_string()))
        })
        .collect()
}

fn size_check(what: &'static str, size: usize) -> Result<()> {
    if size == 0 || size > MAX_ORDER {
        return Err(MlaError::SizeBound {
            what,
            size,
            limit: MAX_ORDER,
        });
    }
    Ok(())
}

fn build_factor(key: &str) -> Result<FiniteMla> {
    let unknown = || MlaError::UnknownKey(key.to_string());
    let (name, args) = match key.find('(') {
        Some(i) if key.ends_with(')') => (&key[..i], &key[i + 1..key.len() - 1]),
        Some(_) => return Err(unknown()),
        None => (key, ""),
    };
    match name {
        "commutator" => return commutator_bracket(&build(args)?),
        "trivial" => return Ok(FiniteMla::trivial()),
        _ => {}
    }
    let nums = parse_args(key, args)?;
    match (name, nums.as_slice()) {
        ("cyclic", &[n]) => cyclic(n),
        ("klein4", &[]) => lie_ring_zero(&[2, 2]),
        ("dihedral", &[n]) if n >= 1 => dihedral(n),
        ("sym", &[3]) => Ok(sym3()),
        ("lie_ring_zero", moduli) if !moduli.is_empty() => lie_ring_zero(moduli),
        ("heisenberg" | "heisenberg_lie_ring", &[p]) if p >= 2 => heisenberg(p),
        _ => Err(unknown()),
    }
}

fn from_tables(n: usize, mul: Vec<usize>, br: Vec<usize>) -> Result<FiniteMla> {
    FiniteMla::from_flat(None, n, mul, br).map_err(MlaError::Invalid)
}

/// `Z_n` with trivial bracket.
pub fn cyclic(n: usize) -> Result<FiniteMla> {
    size_check("cyclic", n)?;
    let mul = (0..n * n).map(|k| (k / n + k % n) % n).collect();
    from_tables(n, mul, vec![0; n * n])
}

/// `Z_{m₁} × … × Z_{m_k}` with trivial bracket. Index of `(a₁,…,a_k)` is
/// mixed radix with `a₁` least significant.
pub fn lie_ring_zero(moduli: &[usize]) -> Result<FiniteMla> {
    let n: usize = moduli.iter().product();
    size_check("lie_ring_zero", n)?;
    if moduli.contains(&0) {
        return Err(MlaError::UnknownKey(format!("lie_ring_zero{moduli:?}")));
    }
    let digits = |mut x: usize| -> Vec<usize> {
        moduli
            .iter()
            .map(|&m| {
                let d = x % m;
                x /= m;
                d
            })
            .collect()
    };
    let encode = |ds: &[usize]| -> usize {
        ds.iter()
            .zip(moduli)
            .rev()
            .fold(0, |acc, (&d, &m)| acc * m + d)
    };
    let mut mul = vec![0; n * n];
    for x in 0..n {
        let dx = digits(x);
        for y in 0..n {
            let dy = digits(y);
            let sum: Vec<usize> = dx
                .iter()
                .zip(&dy)
                .zip(moduli)
                .map(|((a, b), m)| (a + b) % m)
                .collect();
            mul[x * n + y] = encode(&sum);
        }
    }
    from_tables(n, mul, vec![0; n * n])
}

/// Dihedral group of order `2n`, trivial bracket. `r^k s^e` sits at `k + n·e`.
pub fn dihedral(n: usize) -> Result<FiniteMla> {
    size_check("dihedral", 2 * n)?;
    let m = 2 * n;
    let mut mul = vec![0; m * m];
    for x in 0..m {
        let (a, e) = (x % n, x / n);
        for y in 0..m {
            let (b, f) = (y % n, y / n);
            let k = if e == 0 { (a + b) % n } else { (a + n - b) % n };
            mul[x * m + y] = k + n * ((e + f) % 2);
        }
    }
    from_tables(m, mul, vec![0; m * m])
}

/// Permutations of three points in lexicographic order, identity first.
pub fn sym3_permutations() -> Vec<[usize; 3]> {
    vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ]
}

fn sym3() -> FiniteMla {
    let perms = sym3_permutations();
    let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
    let mut mul = vec![0; 36];
    for (i, p) in perms.iter().enumerate() {
        for (j, q) in perms.iter().enumerate() {
            let pq = [p[q[0]], p[q[1]], p[q[2]]];
            mul[i * 6 + j] = index(pq);
        }
    }
    from_tables(6, mul, vec![0; 36]).expect("symmetric group table")
}

/// The Heisenberg Lie ring over `Z_p`: the group `Z_p³` with bracket
/// `{a,b} = (0, 0, a₁b₂ − a₂b₁)`. Index of `(a₁,a₂,a₃)` is `a₁ + p·a₂ + p²·a₃`.
pub fn heisenberg(p: usize) -> Result<FiniteMla> {
    let n = p * p * p;
    size_check("heisenberg", n)?;
    let split = |x: usize| (x % p, (x / p) % p, x / (p * p));
    let mut mul = vec![0; n * n];
    let mut br = vec![0; n * n];
    for x in 0..n {
        let (a1, a2, a3) = split(x);
        for y in 0..n {
            let (b1, b2, b3) = split(y);
            mul[x * n + y] = (a1 + b1) % p + p * ((a2 + b2) % p) + p * p * ((a3 + b3) % p);
            let c = (a1 * b2 % p + p - a2 * b1 % p) % p;
            br[x * n + y] = p * p * c;
        }
    }
    from_tables(n, mul, br)
}

/// The group reduct of `g` with the group commutator `[x,y]` as bracket.
pub fn commutator_bracket(g: &FiniteMla) -> Result<FiniteMla> {
    let n = g.order();
    let mul = g.mul_rows().concat();
    let br = (0..n * n).map(|k| g.commutator(k / n, k % n)).collect();
    from_tables(n, mul, br)
}
