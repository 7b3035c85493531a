use std::collections::HashMap;

use crate::error::{invalid, Error, Result};

/// A finite bounded distributive lattice with precomputed join and meet tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<u32>>,
    meet: Vec<Vec<u32>>,
    bottom: u32,
    top: u32,
}

impl FiniteLattice {
    /// Builds a lattice from element names and covering pairs `(lower, upper)`.
    /// The order is the reflexive-transitive closure of the covers.
    pub fn from_covers(names: Vec<String>, covers: &[(usize, usize)]) -> Result<FiniteLattice> {
        let n = names.len();
        if n < 2 {
            return Err(invalid("a lattice needs at least two elements"));
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(invalid("cover refers to an unknown element"));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(invalid(format!("cycle between `{}` and `{}`", names[i], names[j])));
                }
            }
        }
        let bound = |upper: bool, i: usize, j: usize| -> Option<u32> {
            let cands: Vec<usize> = (0..n)
                .filter(|&k| {
                    if upper {
                        leq[i][k] && leq[j][k]
                    } else {
                        leq[k][i] && leq[k][j]
                    }
                })
                .collect();
            cands
                .iter()
                .copied()
                .find(|&c| cands.iter().all(|&d| if upper { leq[c][d] } else { leq[d][c] }))
                .map(|c| c as u32)
        };
        let mut join = vec![vec![0u32; n]; n];
        let mut meet = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in 0..n {
                join[i][j] = bound(true, i, j)
                    .ok_or_else(|| invalid(format!("`{}` and `{}` have no join", names[i], names[j])))?;
                meet[i][j] = bound(false, i, j)
                    .ok_or_else(|| invalid(format!("`{}` and `{}` have no meet", names[i], names[j])))?;
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|j| leq[b][j]))
            .ok_or_else(|| invalid("no bottom"))?;
        let top = (0..n)
            .find(|&t| (0..n).all(|j| leq[j][t]))
            .ok_or_else(|| invalid("no top"))?;
        let l = FiniteLattice {
            names,
            leq,
            join,
            meet,
            bottom: bottom as u32,
            top: top as u32,
        };
        if let Some((a, b, c)) = l.distributivity_failure() {
            return Err(invalid(format!(
                "not distributive at ({}, {}, {})",
                l.name(a),
                l.name(b),
                l.name(c)
            )));
        }
        Ok(l)
    }

    /// Parses `elements: a b c` followed by `leq: x y` cover lines.
    pub fn parse(text: &str) -> Result<FiniteLattice> {
        let mut names: Option<Vec<String>> = None;
        let mut covers = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: &str| Error::Syntax {
                line: lineno + 1,
                col: 1,
                msg: msg.to_string(),
            };
            if let Some(rest) = line.strip_prefix("elements:") {
                names = Some(rest.split_whitespace().map(str::to_string).collect());
            } else if let Some(rest) = line.strip_prefix("leq:") {
                let ns = names.as_ref().ok_or_else(|| syntax("`leq` before `elements`"))?;
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(syntax("`leq` takes two elements"));
                }
                let idx = |p: &str| {
                    ns.iter()
                        .position(|x| x == p)
                        .ok_or_else(|| syntax(&format!("unknown element `{p}`")))
                };
                covers.push((idx(parts[0])?, idx(parts[1])?));
            } else {
                return Err(syntax("expected `elements:` or `leq:`"));
            }
        }
        let names = names.ok_or_else(|| invalid("missing `elements:` line"))?;
        FiniteLattice::from_covers(names, &covers)
    }

    /// The chain `0 < 1 < … < k-1`.
    pub fn chain(k: usize) -> FiniteLattice {
        let names = (0..k).map(|i| i.to_string()).collect();
        let covers: Vec<(usize, usize)> = (1..k).map(|i| (i - 1, i)).collect();
        FiniteLattice::from_covers(names, &covers).expect("chains are lattices")
    }

    /// The four-element Boolean algebra `0 < a, b < 1`.
    pub fn diamond() -> FiniteLattice {
        let names = ["0", "a", "b", "1"].iter().map(|s| s.to_string()).collect();
        FiniteLattice::from_covers(names, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn bottom(&self) -> u32 {
        self.bottom
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn join(&self, a: u32, b: u32) -> u32 {
        self.join[a as usize][b as usize]
    }

    pub fn meet(&self, a: u32, b: u32) -> u32 {
        self.meet[a as usize][b as usize]
    }

    pub fn leq(&self, a: u32, b: u32) -> bool {
        self.leq[a as usize][b as usize]
    }

    pub fn name(&self, a: u32) -> &str {
        &self.names[a as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.len() as u32
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = u32>) -> u32 {
        xs.into_iter().fold(self.bottom, |a, b| self.join(a, b))
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = u32>) -> u32 {
        xs.into_iter().fold(self.top, |a, b| self.meet(a, b))
    }

    pub fn is_chain(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.leq(a, b) || self.leq(b, a)))
    }

    fn distributivity_failure(&self) -> Option<(u32, u32, u32)> {
        for a in self.elements() {
            for b in self.elements() {
                for c in self.elements() {
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_failure().is_none()
    }

    /// A pair of non-bottom elements whose meet is the bottom.
    pub fn zero_divisors(&self) -> Option<(u32, u32)> {
        for a in self.elements() {
            for b in self.elements() {
                if a != self.bottom && b != self.bottom && self.meet(a, b) == self.bottom {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Adjoins a new global minimum `0*` at index 0; old element `i` becomes `i + 1`.
    /// Returns the new lattice and the companion map `h*` (new id → old id)
    /// sending `0*` to the old bottom and fixing everything else.
    pub fn adjoin_bottom(&self) -> (FiniteLattice, Vec<u32>) {
        let mut names = vec![self.fresh_name("0*")];
        names.extend(self.names.iter().cloned());
        let mut covers = vec![(0, self.bottom as usize + 1)];
        for a in 0..self.len() {
            for b in 0..self.len() {
                if a != b && self.leq[a][b] {
                    covers.push((a + 1, b + 1));
                }
            }
        }
        let l = FiniteLattice::from_covers(names, &covers).expect("adjoining a bottom keeps distributivity");
        let mut h = vec![self.bottom];
        h.extend(self.elements());
        (l, h)
    }

    fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.names.contains(&name) {
            name.push('*');
        }
        name
    }

    /// Map from element names to ids.
    pub fn name_map(&self) -> HashMap<String, u32> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_tables() {
        let d = FiniteLattice::diamond();
        assert_eq!(d.join(1, 2), 3);
        assert_eq!(d.meet(1, 2), 0);
        assert!(!d.is_chain());
        assert_eq!(d.zero_divisors(), Some((1, 2)));
    }

    #[test]
    fn pentagon_is_rejected() {
        let names = ["0", "a", "b", "c", "1"].iter().map(|s| s.to_string()).collect();
        let r = FiniteLattice::from_covers(names, &[(0, 1), (1, 2), (0, 3), (2, 4), (3, 4)]);
        assert!(r.is_err());
    }

    #[test]
    fn adjoin_bottom_of_s3_is_four_chain() {
        let (l, h) = FiniteLattice::chain(3).adjoin_bottom();
        assert_eq!(l.len(), 4);
        assert!(l.is_chain());
        assert_eq!(l.bottom(), 0);
        assert_eq!(h[0], 0);
        for x in l.elements() {
            assert_eq!(l.meet(0, x), 0);
        }
        let (b, _) = FiniteLattice::chain(2).adjoin_bottom();
        assert!(b.is_chain() && b.len() == 3);
    }

    #[test]
    fn parse_file_format() {
        let l = FiniteLattice::parse("elements: 0 a b 1\nleq: 0 a\nleq: 0 b\nleq: a 1\nleq: b 1\n").unwrap();
        assert_eq!(l, FiniteLattice::diamond());
    }
}
