//! Formation/persistence decomposition of a signed transition.
//!
//! Per dyad, with `(Y_{t-1}, Y_t)`:
//!
//! | `Y_{t-1}` | `Y_t` | `(X^F, Z^F)` | `(X^P, Z^P)` |
//! |-----------|-------|--------------|--------------|
//! | 0         | 0     | (0, -)       | (0, -)       |
//! | 0         | ±1    | (1, `Y_t`)   | (0, -)       |
//! | ±1        | 0     | (1, `Y_{t-1}`) | (0, -)     |
//! | ±1        | ±1    | (1, `Y_{t-1}`) | (1, `Y_t`) |
//!
//! Formation keeps the previous sign on every edge that already existed, so
//! only newly formed edges carry free signs in the formation layer.

use std::collections::BTreeSet;

use super::network::{BinaryNetwork, Dyad, DyadState, SignAssignment, SignedNetwork};
use crate::error::{Error, Result};

pub type DyadSet = BTreeSet<Dyad>;

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionDecomposition {
    /// Union layer `x_{t-1} ∪ x_t`.
    pub x_f: BinaryNetwork,
    pub z_f: SignAssignment,
    /// Intersection layer `x_{t-1} ∩ x_t`.
    pub x_p: BinaryNetwork,
    pub z_p: SignAssignment,
    /// Dyads absent at `t-1`; their states are random in formation.
    pub free_f: DyadSet,
    /// Dyads present at `t-1`; their states are random in persistence.
    pub free_p: DyadSet,
}

impl TransitionDecomposition {
    /// Newly formed edges: active in `x_f`, absent at `t-1`.
    pub fn formed(&self) -> impl Iterator<Item = Dyad> + '_ {
        self.x_f.edges().filter(|d| self.free_f.contains(d))
    }
}

pub fn decompose(y_prev: &SignedNetwork, y_curr: &SignedNetwork) -> Result<TransitionDecomposition> {
    if y_prev.nodes() != y_curr.nodes() {
        return Err(Error::Structural(
            "consecutive waves must share the same node set".into(),
        ));
    }
    let nodes = y_prev.nodes().clone();
    let n = nodes.len();
    let mut x_f = BinaryNetwork::empty(nodes.clone());
    let mut x_p = BinaryNetwork::empty(nodes);
    let mut z_f = SignAssignment::empty(n);
    let mut z_p = SignAssignment::empty(n);
    let mut free_f = DyadSet::new();
    let mut free_p = DyadSet::new();

    for d in super::network::all_dyads(n) {
        match (y_prev.get(d), y_curr.get(d)) {
            (DyadState::Absent, DyadState::Absent) => {
                free_f.insert(d);
            }
            (DyadState::Absent, DyadState::Edge(s)) => {
                free_f.insert(d);
                x_f.set(d, true);
                z_f.set(d, s);
            }
            (DyadState::Edge(s), DyadState::Absent) => {
                free_p.insert(d);
                x_f.set(d, true);
                z_f.set(d, s);
            }
            (DyadState::Edge(s_prev), DyadState::Edge(s_curr)) => {
                free_p.insert(d);
                x_f.set(d, true);
                z_f.set(d, s_prev);
                x_p.set(d, true);
                z_p.set(d, s_curr);
            }
        }
    }
    Ok(TransitionDecomposition {
        x_f,
        z_f,
        x_p,
        z_p,
        free_f,
        free_p,
    })
}

/// Rebuilds `y_t = y^P ∪ (y^F \ y_{t-1})`.
pub fn recombine(y_prev: &SignedNetwork, d: &TransitionDecomposition) -> Result<SignedNetwork> {
    check_consistent(y_prev, d)?;
    let mut y = SignedNetwork::empty(y_prev.nodes().clone());
    for dy in d.x_p.edges() {
        let s = d.z_p.get(dy).expect("checked");
        y.put(dy, DyadState::Edge(s));
    }
    for dy in d.x_f.edges() {
        if y_prev.get(dy) == DyadState::Absent {
            let s = d.z_f.get(dy).expect("checked");
            y.put(dy, DyadState::Edge(s));
        }
    }
    Ok(y)
}

fn check_consistent(y_prev: &SignedNetwork, d: &TransitionDecomposition) -> Result<()> {
    let fail = |m: &str| Err(Error::Structural(format!("inconsistent decomposition: {m}")));
    let n = y_prev.n();
    if d.x_f.n() != n || d.x_p.n() != n || d.z_f.n() != n || d.z_p.n() != n {
        return fail("layer sizes differ from the previous wave");
    }
    if !d.z_f.is_defined_on(&d.x_f) || !d.z_p.is_defined_on(&d.x_p) {
        return fail("sign layers are not defined on their interaction layers");
    }
    for (dy, s) in y_prev.edges() {
        if !d.x_f.has(dy) {
            return fail("formation layer drops an edge of the previous wave");
        }
        if d.z_f.get(dy) != Some(s) {
            return fail("formation layer alters a pre-existing sign");
        }
    }
    if d.x_p.edges().any(|dy| y_prev.get(dy) == DyadState::Absent) {
        return fail("persistence layer contains an edge absent at t-1");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::netcore::{NodeSet, Sign};

    fn pair(prev: DyadState, curr: DyadState) -> (SignedNetwork, SignedNetwork) {
        let nodes = Arc::new(NodeSet::anonymous(2));
        let mut a = SignedNetwork::empty(nodes.clone());
        let mut b = SignedNetwork::empty(nodes);
        a.set(0, 1, prev).unwrap();
        b.set(0, 1, curr).unwrap();
        (a, b)
    }

    const P: DyadState = DyadState::Edge(Sign::Pos);
    const N: DyadState = DyadState::Edge(Sign::Neg);
    const O: DyadState = DyadState::Absent;

    #[test]
    fn every_single_dyad_transition() {
        let d01 = Dyad::new(0, 1);
        // (prev, curr, x_f, z_f, x_p, z_p)
        let rows = [
            (O, O, false, None, false, None),
            (O, P, true, Some(Sign::Pos), false, None),
            (O, N, true, Some(Sign::Neg), false, None),
            (P, O, true, Some(Sign::Pos), false, None),
            (P, P, true, Some(Sign::Pos), true, Some(Sign::Pos)),
            (P, N, true, Some(Sign::Pos), true, Some(Sign::Neg)),
            (N, O, true, Some(Sign::Neg), false, None),
            (N, P, true, Some(Sign::Neg), true, Some(Sign::Pos)),
            (N, N, true, Some(Sign::Neg), true, Some(Sign::Neg)),
        ];
        for (prev, curr, xf, zf, xp, zp) in rows {
            let (a, b) = pair(prev, curr);
            let d = decompose(&a, &b).unwrap();
            assert_eq!(d.x_f.has(d01), xf, "{prev:?}->{curr:?}");
            assert_eq!(d.z_f.get(d01), zf);
            assert_eq!(d.x_p.has(d01), xp);
            assert_eq!(d.z_p.get(d01), zp);
            assert_eq!(d.free_f.contains(&d01), prev == O);
            assert_eq!(d.free_p.contains(&d01), prev != O);
            assert_eq!(recombine(&a, &d).unwrap(), b);
        }
    }

    #[test]
    fn identity_transition() {
        let nodes = Arc::new(NodeSet::anonymous(5));
        let y = SignedNetwork::from_edges(
            nodes,
            [(0, 1, Sign::Pos), (1, 2, Sign::Neg), (2, 4, Sign::Neg)],
        )
        .unwrap();
        let d = decompose(&y, &y).unwrap();
        let x = y.interaction();
        assert_eq!(d.x_f, x);
        assert_eq!(d.x_p, x);
        assert_eq!(d.z_f, y.signs());
        assert_eq!(d.z_p, y.signs());
        assert_eq!(d.formed().count(), 0);
        assert_eq!(recombine(&y, &d).unwrap(), y);
    }

    #[test]
    fn mismatched_nodes_and_tampered_decompositions_fail() {
        let a = SignedNetwork::empty(Arc::new(NodeSet::anonymous(3)));
        let b = SignedNetwork::empty(Arc::new(NodeSet::anonymous(4)));
        assert!(matches!(decompose(&a, &b), Err(Error::Structural(_))));

        let (prev, curr) = pair(P, N);
        let mut d = decompose(&prev, &curr).unwrap();
        d.z_f.set(Dyad::new(0, 1), Sign::Neg);
        assert!(recombine(&prev, &d).is_err());

        let (prev, curr) = pair(O, P);
        let mut d = decompose(&prev, &curr).unwrap();
        d.x_p.set(Dyad::new(0, 1), true);
        d.z_p.set(Dyad::new(0, 1), Sign::Pos);
        assert!(recombine(&prev, &d).is_err());
    }
}
