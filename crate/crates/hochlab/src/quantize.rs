//! Quantization maps into the cochain and bar models, and the windowed
//! verification of their structural properties: the commutator cochain
//! `d_D`, the multiplication cochain `phi` with its algebra-map property,
//! the pairing `psi` of operators into the two-sided bar complex, the
//! composite cycle map `chi`, and exact windowed cohomology of both the
//! polydifferential complex and the two-sided bar complex.

use crate::bar::{BarElt, TwoSidedComplex};
use crate::error::AlgebraError;
use crate::linalg::{rank, rank_and_kernel, SparseMat};
use crate::mono::Mono;
use crate::polydiff::{CoeffKind, PolyDiffTensor, RawCoeff, TKey};
use crate::rat::{is_zero, rat, Rat};
use crate::report::CheckRecord;
use crate::weyl::{OneForm, WeylOp};
use crate::window::TruncationWindow;
use num::traits::Zero;
use std::collections::BTreeMap;

/// An element of `Diff(O, D_nu)` in right-normal form: an arity-1 cochain
/// with pure-derivation slot and all functions absorbed into the operator
/// coefficient (which is exactly the canonical form of `PolyDiffTensor`).
pub type DiffOd = PolyDiffTensor;

/// The commutator cochain `x |-> p x - x p`. Its kernel over any window is
/// the centralizer of the functions, i.e. the functions themselves.
pub fn commutator_cochain(p: &WeylOp) -> DiffOd {
    let kind = CoeffKind::Op(p.twist().clone());
    PolyDiffTensor::from_coeff(kind, &RawCoeff::Op(p.clone()))
        .expect("twist matches kind")
        .hochschild_d()
}

/// The multiplication cochain `phi(p) = d_D(p) + 1 (x) p`, i.e.
/// `x |-> p x` in right-normal form. An algebra homomorphism for
/// `diffod_mul`.
pub fn phi(p: &WeylOp) -> DiffOd {
    let n = p.nvars();
    let kind = CoeffKind::Op(p.twist().clone());
    let mut unit_slot = PolyDiffTensor::zero(n, 1, kind);
    for ((a, b), c) in p.terms() {
        unit_slot.add_term(
            TKey {
                slots: vec![Mono::zero(n)],
                ca: a.clone(),
                cb: b.clone(),
            },
            c.clone(),
        );
    }
    commutator_cochain(p)
        .checked_add(&unit_slot)
        .expect("same shape")
}

/// Componentwise product on right-normal forms:
/// `(d^a (x) r) (d^b (x) s) = d^{a+b} (x) (r s)`. The product is only
/// well-defined on canonical representatives; both inputs are canonical by
/// construction.
pub fn diffod_mul(a: &DiffOd, b: &DiffOd) -> Result<DiffOd, AlgebraError> {
    if a.kind() != b.kind() || a.arity() != 1 || b.arity() != 1 {
        return Err(AlgebraError::CoeffMismatch(
            "diffod_mul needs two arity-1 cochains of the same kind".into(),
        ));
    }
    let n = a.nvars();
    let twist = a.kind().twist().cloned().unwrap_or_else(|| OneForm::zero(n));
    let mut out = PolyDiffTensor::zero(n, 1, a.kind().clone());
    for (ka, ca) in a.terms() {
        for (kb, cb) in b.terms() {
            let r = WeylOp::monomial(n, twist.clone(), ka.ca.clone(), ka.cb.clone(), rat(1));
            let s = WeylOp::monomial(n, twist.clone(), kb.ca.clone(), kb.cb.clone(), rat(1));
            let prod = r.checked_mul(&s)?;
            let slot = ka.slots[0].mul(&kb.slots[0]);
            for ((pa, pb), pc) in prod.terms() {
                out.add_term(
                    TKey {
                        slots: vec![slot.clone()],
                        ca: pa.clone(),
                        cb: pb.clone(),
                    },
                    ca.clone() * cb.clone() * pc.clone(),
                );
            }
        }
    }
    Ok(out)
}

/// The unit `1 (x) 1` for `diffod_mul`.
pub fn diffod_unit(nvars: usize, twist: &OneForm) -> DiffOd {
    PolyDiffTensor::identity_cochain(nvars, CoeffKind::Op(twist.clone()))
}

/// Pair a (untwisted) operator and a twisted operator into the length-zero
/// two-sided bar word `n | (empty) | m`.
pub fn psi(n: &WeylOp, m: &WeylOp) -> Result<BarElt, AlgebraError> {
    if !n.is_untwisted() {
        return Err(AlgebraError::TwistMismatch);
    }
    let nv = n.nvars();
    let left = PolyDiffTensor::from_coeff(BarElt::left_kind(nv), &RawCoeff::Op(n.clone()))?;
    let right =
        PolyDiffTensor::from_coeff(BarElt::right_kind(m.twist()), &RawCoeff::Op(m.clone()))?;
    BarElt::from_parts(m.twist(), Some(&left), &[], Some(&right))
}

/// The cycle attached to a coordinate generator: `1 | (empty) | x_i`.
fn chi_coordinate(nvars: usize, twist: &OneForm, i: usize) -> BarElt {
    let x = WeylOp::coordinate(nvars, twist.clone(), i);
    psi(&WeylOp::one(nvars, OneForm::zero(nvars)), &x).expect("untwisted unit")
}

/// The cycle attached to a derivation generator:
/// `1||nabla_i + d_i||1 + 1|e_i|1` with `e_i` the cochain `g |-> d_i g`.
/// The letter term repairs the failure of the length-zero part to be closed;
/// the three coefficients are pinned by `bar_d = 0`.
fn chi_derivation(nvars: usize, twist: &OneForm, i: usize) -> Result<BarElt, AlgebraError> {
    let one_flat = WeylOp::one(nvars, OneForm::zero(nvars));
    let nab = WeylOp::derivation(nvars, twist.clone(), i);
    let di = WeylOp::derivation(nvars, OneForm::zero(nvars), i);
    let a = psi(&one_flat, &nab)?;
    let b = psi(&di, &WeylOp::one(nvars, twist.clone()))?;
    let e_i = PolyDiffTensor::from_raw(
        BarElt::letter_kind(nvars),
        1,
        &[(
            vec![di.clone()],
            RawCoeff::Scalar(crate::poly::Poly::one(nvars)),
            rat(1),
        )],
    )?;
    let unit_n = PolyDiffTensor::unit(nvars, BarElt::left_kind(nvars));
    let unit_m = PolyDiffTensor::unit(nvars, BarElt::right_kind(twist));
    let c = BarElt::from_parts(twist, Some(&unit_n), &[&e_i], Some(&unit_m))?;
    a.checked_add(&b)?.checked_add(&c)
}

/// The quantization cycle `chi(p)` in the two-sided bar complex: defined on
/// the normal-form basis by taking ordered products of the generator cycles
/// under the bar product, extended linearly. `bar_d(chi(p)) = 0` and
/// multiplicativity within caps are verified by the suites.
pub fn chi(p: &WeylOp, length_cap: usize) -> Result<BarElt, AlgebraError> {
    let n = p.nvars();
    let tw = p.twist().clone();
    let mut acc = BarElt::zero(n, tw.clone(), true, true);
    for ((a, b), c) in p.terms() {
        let mut word = BarElt::unit(n, &tw, true, true);
        for i in 0..n {
            for _ in 0..a.0[i] {
                word = word.gv_mul(&chi_coordinate(n, &tw, i), length_cap)?;
            }
        }
        for i in 0..n {
            for _ in 0..b.0[i] {
                word = word.gv_mul(&chi_derivation(n, &tw, i)?, length_cap)?;
            }
        }
        acc = acc.checked_add(&word.scale(c))?;
    }
    Ok(acc)
}

/// Dimension of the Weyl-algebra window: operators with derivation order at
/// most `order_cap` and Bernstein weight exactly `weight`.
pub fn weyl_window_dim(nvars: usize, order_cap: u32, weight: i64) -> usize {
    let mut count = 0;
    for t in 0..=order_cap {
        let xdeg = weight + t as i64;
        if xdeg < 0 {
            continue;
        }
        count += Mono::of_degree(nvars, t).len() * Mono::of_degree(nvars, xdeg as u32).len();
    }
    count
}

/// Basis of the Weyl window as operators.
pub fn weyl_window_basis(nvars: usize, twist: &OneForm, order_cap: u32, weight: i64) -> Vec<WeylOp> {
    let mut out = Vec::new();
    for t in 0..=order_cap {
        let xdeg = weight + t as i64;
        if xdeg < 0 {
            continue;
        }
        for b in Mono::of_degree(nvars, t) {
            for a in Mono::of_degree(nvars, xdeg as u32) {
                out.push(WeylOp::monomial(nvars, twist.clone(), a, b, rat(1)));
            }
        }
    }
    out
}

/// The windowed polydifferential complex `Diff(O^*, P)` at a fixed weight:
/// bases per arity and exact differential matrices. The differential
/// preserves both the weight and the total derivation count, so the window
/// is an honest subcomplex.
pub struct DiffComplexWindow {
    pub kind: CoeffKind,
    pub window: TruncationWindow,
    pub weight: i64,
    pub basis: Vec<Vec<TKey>>,
    pub mats: Vec<SparseMat>,
}

impl DiffComplexWindow {
    pub fn build(kind: &CoeffKind, window: &TruncationWindow) -> Self {
        let n = window.nvars;
        let weight = window.weight.unwrap_or(0);
        let arities = window.arity_cap as usize;
        let mut basis: Vec<Vec<TKey>> = Vec::with_capacity(arities + 1);
        for k in 0..=arities {
            let mut keys = Vec::new();
            for t in 0..=window.order_cap {
                let xdeg = weight + t as i64;
                if xdeg < 0 {
                    continue;
                }
                keys.extend(enum_diff_keys(n, k, t, xdeg as u32, kind.is_scalar()));
            }
            basis.push(keys);
        }
        let mut mats = Vec::new();
        for k in 0..arities {
            let index: BTreeMap<&TKey, usize> = basis[k + 1]
                .iter()
                .enumerate()
                .map(|(i, key)| (key, i))
                .collect();
            let mut mat = SparseMat::zero(basis[k + 1].len(), basis[k].len());
            for (col, key) in basis[k].iter().enumerate() {
                let mut t = PolyDiffTensor::zero(n, k, kind.clone());
                t.add_term(key.clone(), rat(1));
                for (ik, ic) in t.hochschild_d().terms() {
                    let ix = index
                        .get(ik)
                        .unwrap_or_else(|| panic!("differential escaped the window"));
                    mat.add_to(*ix, col, ic.clone());
                }
            }
            mats.push(mat);
        }
        DiffComplexWindow {
            kind: kind.clone(),
            window: window.clone(),
            weight,
            basis,
            mats,
        }
    }

    /// Cohomology dimensions for degrees `0 ..= arity_cap - 1`.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for k in 0..self.mats.len() {
            let rk = rank_and_kernel(&self.mats[k]);
            let prev = if k == 0 {
                0
            } else {
                rank(&self.mats[k - 1])
            };
            out.push(self.basis[k].len() - rk.rank - prev);
        }
        out
    }
}

/// Canonical keys for the polydifferential window; scalar coefficients put
/// all derivations in the slots.
fn enum_diff_keys(n: usize, arity: usize, t: u32, x: u32, scalar: bool) -> Vec<TKey> {
    let mut out = Vec::new();
    let cb_range: Vec<Mono> = if scalar {
        if t == 0 {
            vec![Mono::zero(n)]
        } else {
            vec![]
        }
    } else {
        vec![]
    };
    // split t between slots and coefficient
    for s in 0..=t {
        let cbs: Vec<Mono> = if scalar {
            if s == t {
                cb_range.clone()
            } else {
                continue;
            }
        } else {
            Mono::of_degree(n, t - s)
        };
        for cb in cbs {
            for ca in Mono::of_degree(n, x) {
                for slots in enum_slot_lists_local(n, arity, s) {
                    out.push(TKey {
                        slots,
                        ca: ca.clone(),
                        cb: cb.clone(),
                    });
                }
            }
        }
    }
    out
}

fn enum_slot_lists_local(n: usize, arity: usize, s: u32) -> Vec<Vec<Mono>> {
    if arity == 0 {
        return if s == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for d in 0..=s {
        for head in Mono::of_degree(n, d) {
            for tail in enum_slot_lists_local(n, arity - 1, s - d) {
                let mut v = Vec::with_capacity(arity);
                v.push(head.clone());
                v.extend(tail);
                out.push(v);
            }
        }
    }
    out
}

/// Exact dimension of the centralizer of the coordinate functions inside
/// the Weyl window: the independent oracle for the degree-zero cohomology.
pub fn centralizer_dim(nvars: usize, twist: &OneForm, order_cap: u32, weight: i64) -> usize {
    let basis = weyl_window_basis(nvars, twist, order_cap, weight);
    if basis.is_empty() {
        return 0;
    }
    // target: weight + 1 window (commutators with coordinates raise weight)
    let target = weyl_window_basis(nvars, twist, order_cap, weight + 1);
    let index: BTreeMap<(Mono, Mono), usize> = target
        .iter()
        .enumerate()
        .map(|(i, op)| {
            let (k, _) = op.terms().next().expect("monomial basis");
            (k.clone(), i)
        })
        .collect();
    let mut mat = SparseMat::zero(nvars * target.len(), basis.len());
    for (col, p) in basis.iter().enumerate() {
        for i in 0..nvars {
            let xi = WeylOp::coordinate(nvars, twist.clone(), i);
            let comm = p
                .checked_mul(&xi)
                .unwrap()
                .sub(&xi.checked_mul(p).unwrap());
            for ((a, b), c) in comm.terms() {
                let row = i * target.len() + index[&(a.clone(), b.clone())];
                mat.add_to(row, col, c.clone());
            }
        }
    }
    rank_and_kernel(&mat).kernel.len()
}

/// Report rows of `diff_complex_cohomology`: dimensions with stability
/// flags, one per cohomological degree.
#[derive(Debug, Clone)]
pub struct CohomologyRow {
    pub degree: usize,
    pub dim: usize,
    pub stable: bool,
}

/// Windowed cohomology of `Diff(O^*, P)` at a fixed weight with a stability
/// flag per degree: a dimension is stable when it is unchanged under
/// enlarging the order and arity caps by one.
pub fn diff_complex_cohomology(kind: &CoeffKind, window: &TruncationWindow) -> Vec<CohomologyRow> {
    let dims = DiffComplexWindow::build(kind, window).cohomology_dims();
    let enlarged = DiffComplexWindow::build(kind, &window.enlarged()).cohomology_dims();
    dims.iter()
        .enumerate()
        .map(|(k, &dim)| CohomologyRow {
            degree: k,
            dim,
            stable: enlarged.get(k) == Some(&dim),
        })
        .collect()
}

/// The full bar-quantization verification at a window: cocycle checks for
/// `chi` on generators and random operators, multiplicativity within caps,
/// and the windowed cohomology of the two-sided bar complex against the
/// Weyl-window oracle, with `chi` inducing an injection onto degree zero.
pub fn main_theorem_verify(
    window: &TruncationWindow,
    twist: &OneForm,
    random_ops: &[WeylOp],
    random_pairs: &[(WeylOp, WeylOp)],
) -> Vec<CheckRecord> {
    let n = window.nvars;
    let mut checks = Vec::new();
    let gen_cap = window.bar_length_cap.max(4);

    // (a) cocycle checks on generators and random elements
    let mut gens: Vec<WeylOp> = Vec::new();
    for i in 0..n {
        gens.push(WeylOp::coordinate(n, twist.clone(), i));
        gens.push(WeylOp::derivation(n, twist.clone(), i));
    }
    let mut cocycle_ok = true;
    let mut witness = String::new();
    for p in gens.iter().chain(random_ops.iter()) {
        match chi(p, gen_cap) {
            Ok(c) => {
                let d = c.bar_d().expect("bar_d");
                if !d.is_zero() {
                    cocycle_ok = false;
                    witness = format!("bar_d(chi({})) != 0", p);
                    break;
                }
            }
            Err(e) => {
                cocycle_ok = false;
                witness = format!("chi({}) overflowed: {}", p, e);
                break;
            }
        }
    }
    checks.push(
        CheckRecord::assert("chi-cocycle", cocycle_ok, witness)
            .with("elements", gens.len() + random_ops.len()),
    );

    // (b) multiplicativity within caps
    let mut mult_ok = true;
    let mut witness = String::new();
    let mut pairs: Vec<(WeylOp, WeylOp)> = Vec::new();
    for a in &gens {
        for b in &gens {
            pairs.push((a.clone(), b.clone()));
        }
    }
    pairs.extend(random_pairs.iter().cloned());
    let mut tested = 0usize;
    for (p, q) in &pairs {
        let cap = 2 * gen_cap; // products of two cycles need slack
        let lhs = match chi(&p.checked_mul(q).expect("same twist"), cap) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let rhs = match chi(p, cap).and_then(|cp| chi(q, cap).and_then(|cq| cp.gv_mul(&cq, cap))) {
            Ok(v) => v,
            Err(_) => continue,
        };
        tested += 1;
        if lhs != rhs {
            mult_ok = false;
            witness = format!("chi({} * {}) != chi({}) * chi({})", p, q, p, q);
            break;
        }
    }
    checks.push(
        CheckRecord::assert("chi-multiplicative", mult_ok, witness).with("pairs", tested),
    );

    // (c) + (d) windowed cohomology of the two-sided bar complex
    match TwoSidedComplex::build(window, twist) {
        Ok(cx) => {
            checks.push(CheckRecord::assert(
                "bar-d-squared",
                cx.d_squared_is_zero(),
                "d^2 != 0 on the window",
            ));
            let dims = cx.cohomology_dims();
            let weight = window.weight.unwrap_or(0);
            let expected = weyl_window_dim(n, window.order_cap, weight);
            let h0 = dims.get(&0).copied().unwrap_or(0);
            checks.push(
                CheckRecord::assert(
                    "bar-h0-dimension",
                    h0 == expected,
                    format!("H^0 = {} but the Weyl window has dimension {}", h0, expected),
                )
                .with("h0", h0)
                .with("weyl_window", expected),
            );
            // chi spans H^0 injectively
            let basis0 = cx.basis.get(&0).cloned().unwrap_or_default();
            let index0: BTreeMap<&crate::bar::BarKey, usize> =
                basis0.iter().enumerate().map(|(i, k)| (k, i)).collect();
            let ops = weyl_window_basis(n, twist, window.order_cap, weight);
            let boundary = cx.mats.get(&(-1)).cloned();
            let bcols = boundary.as_ref().map_or(0, |m| m.cols());
            let mut mat = SparseMat::zero(basis0.len(), ops.len() + bcols);
            let mut chi_ok = true;
            let mut witness = String::new();
            for (col, p) in ops.iter().enumerate() {
                match chi(p, window.bar_length_cap) {
                    Ok(c) => {
                        for (k, v) in c.terms() {
                            match index0.get(k) {
                                Some(&row) => mat.add_to(row, col, v.clone()),
                                None => {
                                    chi_ok = false;
                                    witness =
                                        format!("chi({}) leaves the window basis", p);
                                }
                            }
                        }
                    }
                    Err(e) => {
                        chi_ok = false;
                        witness = format!("chi({}): {}", p, e);
                    }
                }
            }
            if let Some(bm) = &boundary {
                for (&(r, c), v) in bm.entries() {
                    mat.add_to(r, ops.len() + c, v.clone());
                }
            }
            let rank_with_chi = rank(&mat);
            let rank_boundary = boundary.as_ref().map_or(0, rank);
            let injective_onto = rank_with_chi - rank_boundary == ops.len() && h0 == ops.len();
            checks.push(
                CheckRecord::assert(
                    "chi-injects-onto-h0",
                    chi_ok && injective_onto,
                    if witness.is_empty() {
                        format!(
                            "chi classes span {} of {} dimensions",
                            rank_with_chi - rank_boundary,
                            ops.len()
                        )
                    } else {
                        witness
                    },
                )
                .with("chi_rank", rank_with_chi - rank_boundary),
            );
            // higher and lower cohomology vanishes, stably
            let enlarged = window.enlarged();
            let dims_large = TwoSidedComplex::build(&enlarged, twist)
                .map(|c| c.cohomology_dims())
                .unwrap_or_default();
            let mut nonzero = Vec::new();
            let mut stable = true;
            for (&deg, &d) in &dims {
                if deg != 0 && d != 0 {
                    nonzero.push((deg, d));
                }
                if deg != 0 && dims_large.get(&deg) != Some(&d) {
                    stable = false;
                }
            }
            if nonzero.is_empty() {
                checks.push(
                    CheckRecord::pass("bar-h-nonzero-vanishes")
                        .with("degrees", dims.len())
                        .with("stable", stable),
                );
            } else if !stable {
                checks.push(
                    CheckRecord::provisional("bar-h-nonzero-vanishes")
                        .with("unstable_degrees", format!("{:?}", nonzero)),
                );
            } else {
                checks.push(CheckRecord::fail(
                    "bar-h-nonzero-vanishes",
                    format!("stable nonzero cohomology at {:?}", nonzero),
                ));
            }
        }
        Err(e) => {
            checks.push(CheckRecord::fail("bar-window-build", e.to_string()));
        }
    }
    checks
}

/// `phi` is multiplicative: `phi(p q) = phi(p) phi(q)` exactly.
pub fn phi_multiplicative(p: &WeylOp, q: &WeylOp) -> Result<bool, AlgebraError> {
    let lhs = phi(&p.checked_mul(q)?);
    let rhs = diffod_mul(&phi(p), &phi(q))?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::polydiff::CochainValue;

    fn zero_tw() -> OneForm {
        OneForm::zero(1)
    }

    fn d_op() -> WeylOp {
        WeylOp::derivation(1, zero_tw(), 0)
    }

    fn x_op() -> WeylOp {
        WeylOp::coordinate(1, zero_tw(), 0)
    }

    #[test]
    fn commutator_cochain_examples() {
        // functions are central
        let f = WeylOp::from_poly(&Poly::var(1, 0).pow(2), zero_tw());
        assert!(commutator_cochain(&f).is_zero());
        // d |-> d (x) 1, the cochain g |-> g'
        let dd = commutator_cochain(&d_op());
        assert_eq!(dd.num_terms(), 1);
        let (k, c) = dd.terms().next().unwrap();
        assert_eq!((k.slots.clone(), k.cb.clone()), (vec![Mono(vec![1])], Mono(vec![0])));
        assert_eq!(c, &rat(1));
        // d^2 |-> d^2 (x) 1 + 2 d (x) d, checked against evaluation
        let d2 = d_op().checked_mul(&d_op()).unwrap();
        let dd2 = commutator_cochain(&d2);
        for k in 0..=5u32 {
            let g = Poly::var(1, 0).pow(k);
            let CochainValue::Op(v) = dd2.eval(&[g.clone()]).unwrap() else {
                panic!()
            };
            let gw = WeylOp::from_poly(&g, zero_tw());
            let expected = d2.checked_mul(&gw).unwrap().sub(&gw.checked_mul(&d2).unwrap());
            assert_eq!(v, expected);
        }
    }

    #[test]
    fn phi_examples() {
        // phi(f) = 1 (x) f
        let f = WeylOp::from_poly(&Poly::var(1, 0), zero_tw());
        let pf = phi(&f);
        assert_eq!(pf.num_terms(), 1);
        let (k, _) = pf.terms().next().unwrap();
        assert!(k.slots[0].is_zero());
        assert_eq!(k.ca, Mono(vec![1]));
        // phi(d) = d (x) 1 + 1 (x) d
        let pd = phi(&d_op());
        assert_eq!(pd.num_terms(), 2);
        // phi(d^2) = d^2 (x) 1 + 2 d (x) d + 1 (x) d^2
        let d2 = d_op().checked_mul(&d_op()).unwrap();
        let pd2 = phi(&d2);
        assert_eq!(pd2.num_terms(), 3);
        let coeffs: Vec<Rat> = pd2.terms().map(|(_, c)| c.clone()).collect();
        assert!(coeffs.contains(&rat(2)));
        // and phi(d)^2 = phi(d^2) under diffod_mul
        assert_eq!(diffod_mul(&pd, &pd).unwrap(), pd2);
        // phi(p) evaluates to g |-> p g
        for k in 0..=4u32 {
            let g = Poly::var(1, 0).pow(k);
            let CochainValue::Op(v) = pd2.eval(&[g.clone()]).unwrap() else {
                panic!()
            };
            assert_eq!(
                v,
                d2.checked_mul(&WeylOp::from_poly(&g, zero_tw())).unwrap()
            );
        }
    }

    #[test]
    fn diffod_product_examples() {
        // (1 (x) x)(d (x) 1 + 1 (x) d) = d (x) x + 1 (x) x d = phi(x d)
        let px = phi(&x_op());
        let pd = phi(&d_op());
        let prod = diffod_mul(&px, &pd).unwrap();
        let xd = x_op().checked_mul(&d_op()).unwrap();
        assert_eq!(prod, phi(&xd));
        // unit law
        let u = diffod_unit(1, &zero_tw());
        assert_eq!(diffod_mul(&u, &pd).unwrap(), pd);
        assert_eq!(diffod_mul(&pd, &u).unwrap(), pd);
    }

    #[test]
    fn phi_multiplicative_on_generators_twisted_and_not() {
        let twists = [
            OneForm::zero(2),
            OneForm::new(vec![Poly::zero(2), Poly::var(2, 0).pow(2)]),
        ];
        for tw in twists {
            let gens = [
                WeylOp::coordinate(2, tw.clone(), 0),
                WeylOp::coordinate(2, tw.clone(), 1),
                WeylOp::derivation(2, tw.clone(), 0),
                WeylOp::derivation(2, tw.clone(), 1),
            ];
            for p in &gens {
                for q in &gens {
                    assert!(phi_multiplicative(p, q).unwrap(), "{} {}", p, q);
                }
            }
        }
    }

    #[test]
    fn psi_pairing_multiplies() {
        // psi(d, 1) . psi(1, d) = psi(d, d)
        let one = WeylOp::one(1, zero_tw());
        let a = psi(&d_op(), &one).unwrap();
        let b = psi(&one, &d_op()).unwrap();
        let prod = a.gv_mul(&b, 2).unwrap();
        assert_eq!(prod, psi(&d_op(), &d_op()).unwrap());
        // unit pairing, degree 0
        let u = psi(&one, &one).unwrap();
        for (k, _) in u.terms() {
            assert_eq!(k.degree(), 0);
        }
    }

    #[test]
    fn chi_cocycle_on_generators() {
        for tw in [
            OneForm::zero(2),
            OneForm::new(vec![Poly::zero(2), Poly::var(2, 0).pow(2)]),
        ] {
            for i in 0..2 {
                let x = WeylOp::coordinate(2, tw.clone(), i);
                let d = WeylOp::derivation(2, tw.clone(), i);
                for p in [x, d] {
                    let c = chi(&p, 3).unwrap();
                    assert!(c.bar_d().unwrap().is_zero(), "chi({}) not closed", p);
                }
            }
        }
    }

    #[test]
    fn chi_respects_defining_relation() {
        // chi(x d) = chi(x) chi(d) and chi(d x) = chi(x d) + chi(1)
        let xd = x_op().checked_mul(&d_op()).unwrap();
        let cap = 4;
        let lhs = chi(&xd, cap).unwrap();
        let rhs = chi(&x_op(), cap)
            .unwrap()
            .gv_mul(&chi(&d_op(), cap).unwrap(), cap)
            .unwrap();
        assert_eq!(lhs, rhs);
        let dx = d_op().checked_mul(&x_op()).unwrap();
        let lhs2 = chi(&dx, cap).unwrap();
        let rhs2 = chi(&d_op(), cap)
            .unwrap()
            .gv_mul(&chi(&x_op(), cap).unwrap(), cap)
            .unwrap();
        assert_eq!(lhs2, rhs2);
        assert!(lhs2.bar_d().unwrap().is_zero());
    }

    #[test]
    fn diff_complex_window_small() {
        // n = 1, weight 2: H^0 = 1 (the monomial x^2), H^1 = 0
        let w = TruncationWindow::new(1, 2, 2).with_weight(2);
        let rows = diff_complex_cohomology(&CoeffKind::Op(zero_tw()), &w);
        assert_eq!(rows[0].dim, 1);
        assert!(rows[0].stable);
        assert_eq!(rows[1].dim, 0);
        assert!(rows[1].stable);
        // centralizer oracle agrees
        assert_eq!(centralizer_dim(1, &zero_tw(), 2, 2), 1);
        // weight -1: no cocycles in degree 0
        let wneg = TruncationWindow::new(1, 2, 2).with_weight(-1);
        let rows = diff_complex_cohomology(&CoeffKind::Op(zero_tw()), &wneg);
        assert_eq!(rows[0].dim, 0);
        assert_eq!(centralizer_dim(1, &zero_tw(), 2, -1), 0);
    }

    #[test]
    fn weyl_window_counts() {
        // n = 1, order <= 1, weight 0: {1, x d}
        assert_eq!(weyl_window_dim(1, 1, 0), 2);
        // n = 2, order <= 1, weight 0: {1, x1 d1, x1 d2, x2 d1, x2 d2}
        assert_eq!(weyl_window_dim(2, 1, 0), 5);
        assert_eq!(weyl_window_basis(1, &zero_tw(), 1, 0).len(), 2);
    }
}
