use std::collections::BTreeSet;

use rand::Rng;

use super::{has_default_avoid, subtree_monomial, GameTree, SNode, Strategy};
use crate::error::{precondition, Error, Result};
use crate::eval::{Node, QKind, UNBOUND};
use crate::formula::Formula;
use crate::provenance::{Monomial, SPoly};

/// `2^{|ψ|+1} + qr(ψ)`: translation needs `n` strictly above this.
pub fn translate_bound(psi: &Formula) -> u128 {
    let exp = (psi.size() + 1).min(127) as u32;
    (1u128 << exp).saturating_add(psi.qr() as u128)
}

/// A universal node of `T` and the successor dropped below it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DroppedBranch {
    /// Path from the root of `T` to the universal node.
    pub path: Vec<usize>,
    /// Index of the dropped successor, if one was dropped.
    pub child: Option<usize>,
}

/// Result of translating `T ∈ C_{n+r+1}(ψ)` into `T* ∈ C_{n+r}(ψ)`.
#[derive(Clone, Debug)]
pub struct Translation {
    pub source: Strategy,
    pub target: Strategy,
    pub n: usize,
    pub r: usize,
    pub dropped: Vec<DroppedBranch>,
}

fn poly(m: Option<Monomial>) -> SPoly {
    m.map(SPoly::from_monomial).unwrap_or_else(SPoly::zero)
}

impl Translation {
    /// `π_{n+r+1}⟦T⟧ ≤ π_{n+r}⟦T*⟧`.
    pub fn value_increases(&self) -> bool {
        self.source.poly().leq(&self.target.poly())
    }

    /// `π_{n+r+1}⟦T⟧ ≤ π_{n+r}⟦T*⟧ · π_{n+r+1}⟦T(w)⟧` for every universal node, with `w` dropped.
    pub fn per_node_bound_holds(&self) -> bool {
        let lhs = self.source.poly();
        let star = self.target.poly();
        self.dropped.iter().all(|d| {
            let Some(k) = d.child else { return false };
            let v = self.source.root.child(&d.path).expect("recorded path exists");
            let w = subtree_monomial(&self.source, &v.children[k]);
            lhs.leq(&star.mul(&poly(w)))
        })
    }
}

/// Relabelling state `g_v` on `[n+r+1]` (0-based).
#[derive(Clone)]
struct Relabel {
    g: Vec<u32>,
}

impl Relabel {
    fn moved(&self) -> BTreeSet<u32> {
        self.g
            .iter()
            .enumerate()
            .filter(|(x, y)| *x as u32 != **y)
            .map(|(_, y)| *y)
            .collect()
    }

    /// The element currently being eliminated.
    fn current(&self) -> u32 {
        self.moved().into_iter().next().unwrap_or(self.g.len() as u32 - 1)
    }

    fn apply(&self, e: u32) -> u32 {
        if e == UNBOUND {
            e
        } else {
            self.g[e as usize]
        }
    }
}

struct Walker<'a> {
    t: &'a Strategy,
    dropped: Vec<DroppedBranch>,
}

impl Walker<'_> {
    fn walk(&mut self, v: &SNode, g: &Relabel, path: &mut Vec<usize>) -> SNode {
        let c = &self.t.tree.compiled;
        let mut children = Vec::new();
        match &c.nodes[v.node] {
            Node::Quant {
                kind: QKind::Exists,
                free,
                ..
            } => {
                let w = &v.children[0];
                let i = g.current();
                let gw = if w.inst == Some(i) {
                    let abar: BTreeSet<u32> = free.iter().map(|&s| v.env[s]).collect();
                    let moved = g.moved();
                    let top = g.g.len() as u32 - 1;
                    let j = (0..top)
                        .rev()
                        .find(|k| !abar.contains(k) && !moved.contains(k))
                        .expect("a fresh element exists below n+r+1");
                    let mut h = g.clone();
                    h.g[i as usize] = j;
                    h
                } else {
                    g.clone()
                };
                path.push(0);
                children.push(self.walk(w, &gw, path));
                path.pop();
            }
            Node::Quant {
                kind: QKind::Forall, ..
            } => {
                let i = g.current();
                let mut dropped = None;
                for (k, w) in v.children.iter().enumerate() {
                    path.push(k);
                    let out = self.walk(w, g, path);
                    path.pop();
                    if w.inst == Some(i) && dropped.is_none() {
                        dropped = Some(k);
                    } else {
                        children.push(out);
                    }
                }
                self.dropped.push(DroppedBranch {
                    path: path.clone(),
                    child: dropped,
                });
            }
            _ => {
                for (k, w) in v.children.iter().enumerate() {
                    path.push(k);
                    children.push(self.walk(w, g, path));
                    path.pop();
                }
            }
        }
        SNode {
            node: v.node,
            env: v.env.iter().map(|&e| g.apply(e)).collect(),
            inst: v.inst.map(|e| g.apply(e)),
            children,
        }
    }
}

/// Translates `T ∈ C_{n+r+1}(ψ)` into `T* ∈ C_{n+r}(ψ)` by the relabelling `g_v`:
/// identity at the root; at an existential node whose witness is the element `i`
/// currently being eliminated, `i` is mapped to the largest `j ≤ n+r` outside `ā`
/// and the moved images; below a universal node the successor instantiating `i`
/// is dropped.
pub fn translate_strategy(t: &Strategy) -> Result<Translation> {
    let psi = t.tree.formula();
    if !psi.is_sentence() || !psi.is_foneq() || !has_default_avoid(psi) {
        return Err(precondition(
            "strategy translation needs an FO≠ sentence with standard exclusions",
        ));
    }
    let r = psi.qr();
    let total = t.n();
    if total < r + 2 {
        return Err(precondition(format!("universe of size {total} is too small")));
    }
    let n = total - r - 1;
    let bound = translate_bound(psi);
    if (n as u128) <= bound {
        return Err(precondition(format!(
            "n = {n} must exceed 2^(|psi|+1) + qr(psi) = {bound}"
        )));
    }
    translate_unchecked(t, n, r)
}

pub(crate) fn translate_unchecked(t: &Strategy, n: usize, r: usize) -> Result<Translation> {
    let total = n + r + 1;
    if t.n() != total {
        return Err(precondition("strategy universe is not n+r+1"));
    }
    if let Some(v) = t
        .support()
        .iter()
        .find(|v| v.elements().iter().any(|&e| e as usize >= n))
    {
        return Err(precondition(format!("support variable {v} lies outside X_n")));
    }
    let mut w = Walker { t, dropped: vec![] };
    let g = Relabel {
        g: (0..total as u32).collect(),
    };
    let root = w.walk(&t.root, &g, &mut vec![]);
    let target = Strategy {
        tree: GameTree {
            compiled: t.tree.compiled.clone(),
            n: total - 1,
            root_env: root.env.clone(),
        },
        root,
    };
    target
        .validate()
        .map_err(|e| Error::Verification(format!("translated tree is not a strategy: {e}")))?;
    let out = Translation {
        source: t.clone(),
        target,
        n,
        r,
        dropped: w.dropped,
    };
    if !out.value_increases() || !out.per_node_bound_holds() {
        return Err(Error::Verification("translation decreased the strategy value".into()));
    }
    Ok(out)
}

/// A random strategy over `[n+r+1]` whose literals use only elements of `[n]`.
pub fn sample_supported<R: Rng>(tree: &GameTree, n: usize, rng: &mut R, high_bias: f64) -> Option<Strategy> {
    tree.sample(
        rng,
        &|g, node, env| g.literal_elements(node, env).iter().all(|&e| (e as usize) < n),
        high_bias,
    )
}
