//! Isomorphism and automorphism search by generator-image backtracking.
//!
//! Generators of the source are chosen greedily. Images are tried only among
//! target elements with the same invariant profile, and after each choice the
//! map is extended over the generated subgroup so that conflicts surface as
//! early as possible.

use crate::algebra::FiniteMla;
use crate::error::{MlaError, Result};
use crate::subset::Subset;

/// Per-element isomorphism invariants.
fn profile(a: &FiniteMla, x: usize) -> [usize; 5] {
    let n = a.order();
    let centralizer = (0..n).filter(|&y| a.mul(x, y) == a.mul(y, x)).count();
    let left_null = (0..n).filter(|&y| a.bracket(x, y) == 0).count();
    let right_null = (0..n).filter(|&y| a.bracket(y, x) == 0).count();
    let square_order = a.element_order(a.mul(x, x));
    [
        a.element_order(x),
        centralizer,
        left_null,
        right_null,
        square_order,
    ]
}

/// Greedy generating set of the group reduct: elements of large order first.
fn generators(a: &FiniteMla) -> Vec<usize> {
    let mut order: Vec<usize> = a.elements().collect();
    order.sort_by_key(|&x| (std::cmp::Reverse(a.element_order(x)), x));
    let mut gens = Vec::new();
    let mut span = a.identity_subset();
    for x in order {
        if span.is_full() {
            break;
        }
        if !span.contains(x) {
            gens.push(x);
            let mut seed = span;
            seed.insert(x);
            span = a.subgroup_closure(&seed);
        }
    }
    gens
}

struct Search<'a> {
    a: &'a FiniteMla,
    b: &'a FiniteMla,
    gens: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    first_only: bool,
    limit: usize,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    /// Extends the map over the subgroup generated by `gens[..=k]`. Returns the
    /// newly assigned elements, or `None` on a conflict (after undoing).
    fn extend(&mut self, k: usize) -> Option<Vec<usize>> {
        let (a, b) = (self.a, self.b);
        let gens = &self.gens[..=k];
        let mut added = Vec::new();
        let mut queue: Vec<usize> = (0..a.order()).filter(|&x| self.map[x].is_some()).collect();
        let mut ok = true;
        'outer: while let Some(x) = queue.pop() {
            let fx = self.map[x].unwrap();
            for &g in gens {
                let fg = self.map[g].unwrap();
                let t = a.mul(x, g);
                let ft = b.mul(fx, fg);
                match self.map[t] {
                    Some(v) if v != ft => {
                        ok = false;
                        break 'outer;
                    }
                    Some(_) => {}
                    None => {
                        if self.used[ft] {
                            ok = false;
                            break 'outer;
                        }
                        self.map[t] = Some(ft);
                        self.used[ft] = true;
                        added.push(t);
                        queue.push(t);
                    }
                }
            }
        }
        if ok {
            // Brackets inside the current span must be respected.
            let span: Vec<usize> = (0..a.order()).filter(|&x| self.map[x].is_some()).collect();
            'check: for &x in &span {
                for &y in &span {
                    if let Some(v) = self.map[a.bracket(x, y)] {
                        if v != b.bracket(self.map[x].unwrap(), self.map[y].unwrap()) {
                            ok = false;
                            break 'check;
                        }
                    }
                }
            }
        }
        if ok {
            Some(added)
        } else {
            self.undo(&added);
            None
        }
    }

    fn undo(&mut self, added: &[usize]) {
        for &t in added {
            if let Some(v) = self.map[t].take() {
                self.used[v] = false;
            }
        }
    }

    fn run(&mut self, k: usize) -> bool {
        if k == self.gens.len() {
            if self.map.iter().all(Option::is_some) {
                let a = self.a;
                let map: Vec<usize> = self.map.iter().map(|v| v.unwrap()).collect();
                let brackets_ok = a.elements().all(|x| {
                    a.elements()
                        .all(|y| map[a.bracket(x, y)] == self.b.bracket(map[x], map[y]))
                });
                if brackets_ok {
                    self.found.push(map);
                    if self.first_only || self.found.len() > self.limit {
                        return true;
                    }
                }
            }
            return false;
        }
        let g = self.gens[k];
        for c in self.candidates[k].clone() {
            if self.used[c] {
                continue;
            }
            self.map[g] = Some(c);
            self.used[c] = true;
            let mut assigned = vec![g];
            if let Some(added) = self.extend(k) {
                assigned.extend(added);
                if self.run(k + 1) {
                    return true;
                }
            }
            self.undo(&assigned);
        }
        false
    }
}

fn search(a: &FiniteMla, b: &FiniteMla, first_only: bool, limit: usize) -> Vec<Vec<usize>> {
    if a.order() != b.order() {
        return Vec::new();
    }
    let pa: Vec<_> = a.elements().map(|x| profile(a, x)).collect();
    let pb: Vec<_> = b.elements().map(|x| profile(b, x)).collect();
    let (mut sa, mut sb) = (pa.clone(), pb.clone());
    sa.sort();
    sb.sort();
    if sa != sb {
        return Vec::new();
    }
    let gens = generators(a);
    let candidates = gens
        .iter()
        .map(|&g| b.elements().filter(|&y| pb[y] == pa[g]).collect())
        .collect();
    let mut s = Search {
        a,
        b,
        gens,
        candidates,
        map: vec![None; a.order()],
        used: vec![false; b.order()],
        first_only,
        limit,
        found: Vec::new(),
    };
    s.map[0] = Some(0);
    s.used[0] = true;
    s.run(0);
    s.found
}

/// Finds an isomorphism `a → b`, or `None` if the algebras are not isomorphic.
pub fn find_isomorphism(a: &FiniteMla, b: &FiniteMla) -> Option<Vec<usize>> {
    search(a, b, true, usize::MAX).pop()
}

pub fn are_isomorphic(a: &FiniteMla, b: &FiniteMla) -> bool {
    find_isomorphism(a, b).is_some()
}

/// All automorphisms of `a`, in the order the backtracking visits them.
///
/// `max_order` caps the order of algebras accepted; `max_count` caps the size
/// of the returned group.
pub fn automorphisms(a: &FiniteMla, max_order: usize, max_count: usize) -> Result<Vec<Vec<usize>>> {
    if a.order() > max_order {
        return Err(MlaError::SizeBound {
            what: "automorphism enumeration",
            size: a.order(),
            limit: max_order,
        });
    }
    let mut all = search(a, a, false, max_count);
    if all.len() > max_count {
        return Err(MlaError::SearchBound {
            what: "automorphism enumeration",
            explored: all.len() as u128,
            limit: max_count as u64,
        });
    }
    all.sort();
    Ok(all)
}

/// Composition `f ∘ g` of index maps.
pub fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

/// Inverse of a bijective index map.
pub fn invert(f: &[usize]) -> Vec<usize> {
    let mut out = vec![0; f.len()];
    for (x, &y) in f.iter().enumerate() {
        out[y] = x;
    }
    out
}

/// Image of a subset under an index map.
pub fn image(f: &[usize], s: &Subset, target_order: usize) -> Subset {
    Subset::from_indices(target_order, s.iter().map(|x| f[x]))
}
