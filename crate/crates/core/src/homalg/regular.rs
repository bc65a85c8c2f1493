use serde::{Deserialize, Serialize};

use crate::exactla::{Accumulator, ScalarMatrix, SparseVec};
use crate::resolution::FreeResolution;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AsRegularity {
    /// finite global dimension `h` and `Ext^h(k, A) = k(l)`, within bounds
    Regular { h: usize, l: u32 },
    NotRegular { reason: String },
    Undetermined { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsRegularReport {
    pub status: AsRegularity,
    /// nonzero `dim Ext^n(k, A)_u` found, as `(n, u, dim)`
    pub cohomology: Vec<(usize, i64, usize)>,
    /// number of `(n, u)` pairs whose cohomology was fully determined
    pub checked: usize,
}

/// Cochains `Hom(P_n, A)_u = ⊕_g A_{u + s_g}`, as block sizes.
fn blocks(res: &FreeResolution, n: usize, u: i64) -> Vec<usize> {
    let a = res.algebra();
    res.shifts(n).iter().map(|&s| a.dim(u + s as i64)).collect()
}

/// `Hom(P_n, A)_u → Hom(P_{n+1}, A)_u`, `f ↦ f ∘ d_{n+1}`.
fn coboundary(res: &FreeResolution, n: usize, u: i64) -> ScalarMatrix {
    let a = res.algebra();
    let src = blocks(res, n, u);
    let tgt = blocks(res, n + 1, u);
    let tgt_off: Vec<usize> = tgt.iter().scan(0, |acc, &d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let rows = tgt.iter().sum();
    let mut cols = Vec::new();
    let Some(d) = res.differential(n + 1) else {
        return ScalarMatrix::zero(rows, src.iter().sum());
    };
    let pn = res.module(n).unwrap();
    let images: Vec<SparseVec> = (0..d.source().rank()).map(|g| d.image_of_generator(g)).collect();
    for (g, &size) in src.iter().enumerate() {
        let sg = pn.shift(g);
        for k in 0..size {
            let f = SparseVec::unit(k);
            let fdeg = (u + sg as i64) as u32;
            let mut acc = Accumulator::new(rows.max(1));
            for (gp, img) in images.iter().enumerate() {
                let sgp = d.source().shift(gp);
                if sgp < sg || tgt[gp] == 0 {
                    continue;
                }
                let entry = pn.block(sgp, img, g);
                if entry.is_zero() {
                    continue;
                }
                let prod = a.mul(sgp - sg, &entry, fdeg, &f);
                acc.add_scaled(&prod.map_indices(|i| i + tgt_off[gp]), &crate::exactla::Scalar::one());
            }
            cols.push(acc.drain());
        }
    }
    ScalarMatrix::from_sparse_cols(rows, &cols)
}

/// Checks finite global dimension and the Gorenstein condition `Ext^i(k, A) = δ_{ih} k(l)`
/// on every bidegree that the truncation determines.
pub fn as_regular_report(res: &FreeResolution) -> AsRegularReport {
    let undetermined = |reason: &str| AsRegularReport {
        status: AsRegularity::Undetermined { reason: reason.into() },
        cohomology: Vec::new(),
        checked: 0,
    };
    if !res.terminated() {
        return undetermined("the resolution does not terminate within the bounds");
    }
    let h = res.top();
    let bound = res.bound() as i64;
    let max_shift = |n: usize| -> i64 { res.shifts(n).iter().copied().max().map_or(0, |s| s as i64) };
    let mut cohomology = Vec::new();
    let mut checked = 0;
    let mut top_seen = false;
    for n in 0..=h {
        let lo = -max_shift(n);
        let neighbours = [n.checked_sub(1), Some(n), (n < h).then_some(n + 1)];
        let hi = bound - neighbours.iter().flatten().map(|&k| max_shift(k)).max().unwrap();
        for u in lo..=hi {
            let dim: usize = blocks(res, n, u).iter().sum();
            let out = if n < h { coboundary(res, n, u).rank() } else { 0 };
            let inc = if n > 0 { coboundary(res, n - 1, u).rank() } else { 0 };
            let hdim = dim - out - inc;
            checked += 1;
            if n == h && u == -(res.shifts(h)[0] as i64) {
                top_seen = true;
            }
            if hdim > 0 {
                cohomology.push((n, u, hdim));
            }
        }
    }
    let status = if res.shifts(h).len() != 1 {
        AsRegularity::NotRegular { reason: format!("top term has rank {}", res.shifts(h).len()) }
    } else if !top_seen {
        AsRegularity::Undetermined { reason: "the top class lies outside the determined range".into() }
    } else {
        let l = res.shifts(h)[0];
        if cohomology == [(h, -(l as i64), 1)] {
            AsRegularity::Regular { h, l }
        } else {
            AsRegularity::NotRegular { reason: format!("Ext(k, A) has dimensions {cohomology:?}") }
        }
    };
    AsRegularReport { status, cohomology, checked }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::{parse_expr, Alphabet, NcPoly};
    use crate::galgebra::GradedAlgebra;
    use crate::resolution::minimal_resolution;
    use std::sync::Arc;

    fn report(names: &[&str], rels: &[&str], d: u32, h: usize) -> AsRegularReport {
        let a = Alphabet::linear(names).unwrap();
        let rels: Vec<NcPoly> = rels.iter().map(|r| parse_expr(r, &a).unwrap()).collect();
        let alg = Arc::new(GradedAlgebra::new(&a, &rels, d).unwrap());
        as_regular_report(&minimal_resolution(alg, h).unwrap())
    }

    #[test]
    fn regular_types() {
        assert_eq!(report(&["x", "y"], &["y*x - x*y"], 6, 4).status, AsRegularity::Regular { h: 2, l: 2 });
        let r = report(&["x1", "x2"], &["x1*x1*x2 - x2*x1*x1", "x1*x2*x2 - x2*x2*x1"], 8, 5);
        assert_eq!(r.status, AsRegularity::Regular { h: 3, l: 4 });
    }

    #[test]
    fn non_regular_algebras() {
        // k[x]/(x²) has infinite global dimension
        let r = report(&["x"], &["x*x"], 6, 3);
        assert!(matches!(r.status, AsRegularity::Undetermined { .. }));
        // k<x,y>/(xy) is not Gorenstein
        let r = report(&["x", "y"], &["x*y"], 6, 3);
        assert!(!matches!(r.status, AsRegularity::Regular { .. }));
    }
}
