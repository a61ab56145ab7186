//! Polydifferential operators `Diff(O^k, P)` in tensor normal form: the
//! cochain model of Hochschild cohomology with coefficients in `P` for
//! `P` one of the functions `O`, a twisted operator algebra `D_nu`, or its
//! opposite `D_nu^op` (the latter optionally carrying the opposite cochain
//! algebra structure on the outside).
//!
//! A cochain of arity `k` is stored as a rational combination of keys
//! `d^{b_1} (x) ... (x) d^{b_k} (x) p` with pure-derivation slots and a
//! coefficient monomial `p = x^a nabla^b`; all polynomial slot coefficients
//! are absorbed rightward into `p` through the output-multiplication
//! bimodule structure (`x d (x) 1 = d (x) x`). The stored cochain evaluates
//! as
//!
//! * `O`, `D_nu`:  `(f_1,..,f_k) |-> t_1(f_1) ... t_k(f_k) * p`,
//! * `D_nu^op`:    `(f_1,..,f_k) |-> p * t_1(f_1) ... t_k(f_k)`,
//!
//! products taken in `D_nu`; this makes canonical forms unique and keeps
//! every operation (differential, cup, braces) a finite exact expansion.
//!
//! Sign conventions are fixed once here and shared by the bar module: the
//! Hochschild differential follows the alternating-sum formula with the
//! commutator sign at arity zero for operator coefficients (so that
//! `d(p) = (x |-> p x - x p)` on `Diff(O^0, D)`), the cup product carries
//! `(-1)^{ij}`, and braces carry `(-1)^{sum i_l (j_l - 1)}`.

use crate::error::{AlgebraError, ArityError};
use crate::mono::Mono;
use crate::poly::Poly;
use crate::rat::{is_zero, rat, sign, Rat};
use crate::weyl::{OneForm, WeylOp};
use std::collections::BTreeMap;
use std::fmt;

/// Coefficient bimodule of a cochain complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoeffKind {
    /// `P = O`, the functions.
    Scalar(usize),
    /// `P = D_nu`.
    Op(OneForm),
    /// `P = D_nu^op`; `outer` additionally takes the opposite of the cochain
    /// algebra itself (the convention used for the left factor of the
    /// two-sided bar complex).
    OpRev { twist: OneForm, outer: bool },
}

impl CoeffKind {
    pub fn nvars(&self) -> usize {
        match self {
            CoeffKind::Scalar(n) => *n,
            CoeffKind::Op(t) => t.nvars(),
            CoeffKind::OpRev { twist, .. } => twist.nvars(),
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, CoeffKind::Scalar(_))
    }

    pub fn twist(&self) -> Option<&OneForm> {
        match self {
            CoeffKind::Scalar(_) => None,
            CoeffKind::Op(t) => Some(t),
            CoeffKind::OpRev { twist, .. } => Some(twist),
        }
    }

    fn is_outer(&self) -> bool {
        matches!(self, CoeffKind::OpRev { outer: true, .. })
    }
}

impl fmt::Display for CoeffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffKind::Scalar(_) => write!(f, "@O"),
            CoeffKind::Op(_) => write!(f, "@D"),
            CoeffKind::OpRev { outer: false, .. } => write!(f, "@Dop"),
            CoeffKind::OpRev { outer: true, .. } => write!(f, "@Dop^op"),
        }
    }
}

/// Canonical basis key of a tensor: pure-derivation slots plus the
/// coefficient monomial exponents (`cb` is zero for scalar coefficients).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TKey {
    pub slots: Vec<Mono>,
    pub ca: Mono,
    pub cb: Mono,
}

impl TKey {
    /// Total derivation count: slot orders plus coefficient order.
    pub fn total_order(&self) -> u32 {
        self.slots.iter().map(|s| s.degree()).sum::<u32>() + self.cb.degree()
    }

    /// Bernstein weight (`deg x = +1`, `deg d = -1`).
    pub fn weight(&self) -> i64 {
        self.ca.degree() as i64 - self.total_order() as i64
    }
}

/// Value of a cochain evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CochainValue {
    Scalar(Poly),
    Op(WeylOp),
}

impl CochainValue {
    pub fn is_zero(&self) -> bool {
        match self {
            CochainValue::Scalar(p) => p.is_zero(),
            CochainValue::Op(op) => op.is_zero(),
        }
    }
}

/// A polydifferential cochain in canonical tensor form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyDiffTensor {
    nvars: usize,
    arity: usize,
    kind: CoeffKind,
    terms: BTreeMap<TKey, Rat>,
}

/// Raw coefficient element accepted by `from_raw`.
#[derive(Debug, Clone)]
pub enum RawCoeff {
    Scalar(Poly),
    Op(WeylOp),
}

impl PolyDiffTensor {
    pub fn zero(nvars: usize, arity: usize, kind: CoeffKind) -> Self {
        assert_eq!(kind.nvars(), nvars);
        PolyDiffTensor {
            nvars,
            arity,
            kind,
            terms: BTreeMap::new(),
        }
    }

    /// The unit: arity 0, coefficient 1.
    pub fn unit(nvars: usize, kind: CoeffKind) -> Self {
        let mut t = PolyDiffTensor::zero(nvars, 0, kind);
        t.add_term(
            TKey {
                slots: vec![],
                ca: Mono::zero(nvars),
                cb: Mono::zero(nvars),
            },
            rat(1),
        );
        t
    }

    /// The identity cochain `1 (x) 1` of arity 1.
    pub fn identity_cochain(nvars: usize, kind: CoeffKind) -> Self {
        let mut t = PolyDiffTensor::zero(nvars, 1, kind);
        t.add_term(
            TKey {
                slots: vec![Mono::zero(nvars)],
                ca: Mono::zero(nvars),
                cb: Mono::zero(nvars),
            },
            rat(1),
        );
        t
    }

    /// An arity-0 cochain from a coefficient element.
    pub fn from_coeff(kind: CoeffKind, c: &RawCoeff) -> Result<Self, AlgebraError> {
        PolyDiffTensor::from_raw(kind, 0, &[(vec![], c.clone(), rat(1))])
    }

    /// Canonicalize a linear combination of raw tuples
    /// `t_1 (x) ... (x) t_k (x) p` with arbitrary (untwisted) operator
    /// slots: polynomial slot parts are absorbed into the coefficient
    /// through the output-multiplication structure, leaving pure slots.
    /// Evaluation is unchanged by canonicalization.
    pub fn from_raw(
        kind: CoeffKind,
        arity: usize,
        raw: &[(Vec<WeylOp>, RawCoeff, Rat)],
    ) -> Result<Self, AlgebraError> {
        let nvars = kind.nvars();
        let mut out = PolyDiffTensor::zero(nvars, arity, kind.clone());
        for (slots, coeff, prefactor) in raw {
            if slots.len() != arity {
                return Err(AlgebraError::ArgCount {
                    expected: arity,
                    found: slots.len(),
                });
            }
            for s in slots {
                if !s.is_untwisted() {
                    return Err(AlgebraError::NoCanonicalAction);
                }
                if s.nvars() != nvars {
                    return Err(ArityError {
                        expected: nvars,
                        found: s.nvars(),
                    }
                    .into());
                }
            }
            let coeff_terms: Vec<(Mono, Mono, Rat)> = match (coeff, &kind) {
                (RawCoeff::Scalar(p), _) => {
                    if p.nvars() != nvars {
                        return Err(ArityError {
                            expected: nvars,
                            found: p.nvars(),
                        }
                        .into());
                    }
                    p.terms()
                        .map(|(m, c)| (m.clone(), Mono::zero(nvars), c.clone()))
                        .collect()
                }
                (RawCoeff::Op(op), CoeffKind::Scalar(_)) => {
                    if op.order() > Some(0) {
                        return Err(AlgebraError::CoeffMismatch(
                            "operator coefficient in a scalar cochain".into(),
                        ));
                    }
                    op.terms()
                        .map(|((a, b), c)| (a.clone(), b.clone(), c.clone()))
                        .collect()
                }
                (RawCoeff::Op(op), k) => {
                    if op.twist() != k.twist().unwrap() {
                        return Err(AlgebraError::TwistMismatch);
                    }
                    op.terms()
                        .map(|((a, b), c)| (a.clone(), b.clone(), c.clone()))
                        .collect()
                }
            };
            // distribute slot terms, collecting polynomial parts into `fun`
            let slot_terms: Vec<Vec<(&Mono, &Mono, &Rat)>> = slots
                .iter()
                .map(|s| s.terms().map(|((a, b), c)| (a, b, c)).collect())
                .collect();
            let mut stack: Vec<(Vec<Mono>, Poly, Rat)> =
                vec![(Vec::new(), Poly::one(nvars), prefactor.clone())];
            for st in &slot_terms {
                let mut next = Vec::new();
                for (pslots, fun, c) in &stack {
                    for (a, b, sc) in st {
                        let mut ps = pslots.clone();
                        ps.push((*b).clone());
                        let f2 = fun * &Poly::monomial(nvars, (*a).clone(), rat(1));
                        next.push((ps, f2, c.clone() * (*sc).clone()));
                    }
                }
                stack = next;
            }
            for (pslots, fun, c) in stack {
                for (ca, cb, cc) in &coeff_terms {
                    for (m, fc) in fun.terms() {
                        for (ka, kb, kc) in absorb_function(&kind, ca, cb, m) {
                            out.add_term(
                                TKey {
                                    slots: pslots.clone(),
                                    ca: ka,
                                    cb: kb,
                                },
                                c.clone() * cc.clone() * fc.clone() * kc,
                            );
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> &CoeffKind {
        &self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TKey, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, key: TKey, c: Rat) {
        debug_assert_eq!(key.slots.len(), self.arity);
        if is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if is_zero(&s) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = PolyDiffTensor::zero(self.nvars, self.arity, self.kind.clone());
        if is_zero(c) {
            return out;
        }
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.kind != other.kind || self.arity != other.arity {
            return Err(AlgebraError::CoeffMismatch(
                "cannot add cochains of different kind or arity".into(),
            ));
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.checked_add(&other.scale(&rat(-1)))
            .expect("same shape")
    }

    /// Evaluate on an argument tuple.
    pub fn eval(&self, args: &[Poly]) -> Result<CochainValue, AlgebraError> {
        if args.len() != self.arity {
            return Err(AlgebraError::ArgCount {
                expected: self.arity,
                found: args.len(),
            });
        }
        for a in args {
            if a.nvars() != self.nvars {
                return Err(ArityError {
                    expected: self.nvars,
                    found: a.nvars(),
                }
                .into());
            }
        }
        let twist = self
            .kind
            .twist()
            .cloned()
            .unwrap_or_else(|| OneForm::zero(self.nvars));
        match &self.kind {
            CoeffKind::Scalar(_) => {
                let mut out = Poly::zero(self.nvars);
                for (k, c) in &self.terms {
                    let mut h = Poly::monomial(self.nvars, k.ca.clone(), c.clone());
                    for (s, f) in k.slots.iter().zip(args) {
                        h = &h * &f.partial_multi(s);
                        if h.is_zero() {
                            break;
                        }
                    }
                    out = &out + &h;
                }
                Ok(CochainValue::Scalar(out))
            }
            CoeffKind::Op(_) => {
                let mut out = WeylOp::zero(self.nvars, twist.clone());
                for (k, c) in &self.terms {
                    let mut h = Poly::constant(self.nvars, c.clone());
                    for (s, f) in k.slots.iter().zip(args) {
                        h = &h * &f.partial_multi(s);
                        if h.is_zero() {
                            break;
                        }
                    }
                    for (m, hc) in h.terms() {
                        out.add_term(m.mul(&k.ca), k.cb.clone(), hc.clone());
                    }
                }
                Ok(CochainValue::Op(out))
            }
            CoeffKind::OpRev { .. } => {
                let mut out = WeylOp::zero(self.nvars, twist.clone());
                for (k, c) in &self.terms {
                    let mut h = Poly::constant(self.nvars, c.clone());
                    for (s, f) in k.slots.iter().zip(args) {
                        h = &h * &f.partial_multi(s);
                        if h.is_zero() {
                            break;
                        }
                    }
                    if h.is_zero() {
                        continue;
                    }
                    let p = WeylOp::monomial(
                        self.nvars,
                        twist.clone(),
                        k.ca.clone(),
                        k.cb.clone(),
                        rat(1),
                    );
                    let prod = p.checked_mul(&WeylOp::from_poly(&h, twist.clone()))?;
                    out = out.checked_add(&prod)?;
                }
                Ok(CochainValue::Op(out))
            }
        }
    }

    /// The Hochschild differential, computed structurally: an identity slot
    /// is prepended, the Leibniz coproduct splits each slot with alternating
    /// signs, and the coefficient's multiplication by the last argument is
    /// expanded into a fresh slot. For operator coefficients at arity zero
    /// the commutator sign is used, so `d(p) = (x |-> p x - x p)` on
    /// `Diff(O^0, D)`.
    pub fn hochschild_d(&self) -> Self {
        let k = self.arity;
        let n = self.nvars;
        let mut out = PolyDiffTensor::zero(n, k + 1, self.kind.clone());
        let flip = k == 0 && !self.kind.is_scalar();
        let global = if flip { rat(-1) } else { rat(1) };
        for (key, c) in &self.terms {
            let c = c.clone() * global.clone();
            // outer left: prepend identity slot
            {
                let mut slots = Vec::with_capacity(k + 1);
                slots.push(Mono::zero(n));
                slots.extend(key.slots.iter().cloned());
                out.add_term(
                    TKey {
                        slots,
                        ca: key.ca.clone(),
                        cb: key.cb.clone(),
                    },
                    c.clone(),
                );
            }
            // merge at slot j (1-based) with sign (-1)^j
            for j in 0..k {
                let sgn = sign(j as u32 + 1);
                let b = &key.slots[j];
                for e in b.sub_indices() {
                    let coeff = b.binom(&e);
                    let mut slots = Vec::with_capacity(k + 1);
                    slots.extend(key.slots[..j].iter().cloned());
                    slots.push(e.clone());
                    slots.push(b.checked_sub(&e).unwrap());
                    slots.extend(key.slots[j + 1..].iter().cloned());
                    out.add_term(
                        TKey {
                            slots,
                            ca: key.ca.clone(),
                            cb: key.cb.clone(),
                        },
                        c.clone() * coeff * sgn.clone(),
                    );
                }
            }
            // outer right with sign (-1)^{k+1}
            let sgn = sign(k as u32 + 1);
            match &self.kind {
                CoeffKind::Scalar(_) => {
                    let mut slots = key.slots.clone();
                    slots.push(Mono::zero(n));
                    out.add_term(
                        TKey {
                            slots,
                            ca: key.ca.clone(),
                            cb: key.cb.clone(),
                        },
                        c.clone() * sgn,
                    );
                }
                CoeffKind::Op(_) => {
                    // p * g = sum_e C(b,e) d^e(g) x^a nabla^{b-e}
                    for e in key.cb.sub_indices() {
                        let coeff = key.cb.binom(&e);
                        let mut slots = key.slots.clone();
                        slots.push(e.clone());
                        out.add_term(
                            TKey {
                                slots,
                                ca: key.ca.clone(),
                                cb: key.cb.checked_sub(&e).unwrap(),
                            },
                            c.clone() * coeff * sgn.clone(),
                        );
                    }
                }
                CoeffKind::OpRev { .. } => {
                    // g * p = sum_e (-1)^{|e|} C(b,e) x^a nabla^{b-e} d^e(g)
                    for e in key.cb.sub_indices() {
                        let coeff = key.cb.binom(&e) * sign(e.degree());
                        let mut slots = key.slots.clone();
                        slots.push(e.clone());
                        out.add_term(
                            TKey {
                                slots,
                                ca: key.ca.clone(),
                                cb: key.cb.checked_sub(&e).unwrap(),
                            },
                            c.clone() * coeff * sgn.clone(),
                        );
                    }
                }
            }
        }
        out
    }

    /// The alternating-sum evaluation of the Hochschild differential,
    /// computed without touching tensor forms; the independent oracle for
    /// `hochschild_d`.
    pub fn eval_formula_d(&self, args: &[Poly]) -> Result<CochainValue, AlgebraError> {
        let k = self.arity;
        if args.len() != k + 1 {
            return Err(AlgebraError::ArgCount {
                expected: k + 1,
                found: args.len(),
            });
        }
        let flip = k == 0 && !self.kind.is_scalar();
        let fs = if flip { rat(-1) } else { rat(1) };
        let mut acc = ValueAcc::zero(self.nvars, &self.kind);
        acc.add(
            &left_act(&self.kind, &args[0], &self.eval(&args[1..])?)?,
            fs.clone(),
        );
        for j in 0..k {
            let mut tuple = Vec::with_capacity(k);
            tuple.extend(args[..j].iter().cloned());
            tuple.push(&args[j] * &args[j + 1]);
            tuple.extend(args[j + 2..].iter().cloned());
            acc.add(&self.eval(&tuple)?, sign(j as u32 + 1) * fs.clone());
        }
        acc.add(
            &right_act(&self.kind, &self.eval(&args[..k])?, &args[k])?,
            sign(k as u32 + 1) * fs,
        );
        Ok(acc.finish())
    }

    /// Cup product. Both factors must share the coefficient kind; the result
    /// has arity `i + j` and carries the sign `(-1)^{ij}`. For operator
    /// coefficients the left coefficient is carried across the right block
    /// by the Leibniz rule; for opposite coefficients the multiplication
    /// order reverses, and the outer opposite reverses the concatenation as
    /// well.
    pub fn cup(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.kind != other.kind {
            return Err(AlgebraError::CoeffMismatch(format!(
                "cup of {} with {}",
                self.kind, other.kind
            )));
        }
        if self.kind.is_outer() {
            // A *op* B = (-1)^{|A||B|} B * A; the inner product contributes
            // the same (-1)^{|B||A|}, so the two signs cancel.
            return other.cup_inner(self, true);
        }
        self.cup_inner(other, false)
    }

    fn cup_inner(&self, other: &Self, skip_sign: bool) -> Result<Self, AlgebraError> {
        let n = self.nvars;
        let (i, j) = (self.arity, other.arity);
        let mut out = PolyDiffTensor::zero(n, i + j, self.kind.clone());
        let global = if skip_sign {
            rat(1)
        } else {
            sign((i * j) as u32)
        };
        let twist = self
            .kind
            .twist()
            .cloned()
            .unwrap_or_else(|| OneForm::zero(n));
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let base = global.clone() * ca.clone() * cb.clone();
                match &self.kind {
                    CoeffKind::Scalar(_) => {
                        let mut slots = ka.slots.clone();
                        slots.extend(kb.slots.iter().cloned());
                        out.add_term(
                            TKey {
                                slots,
                                ca: ka.ca.mul(&kb.ca),
                                cb: Mono::zero(n),
                            },
                            base,
                        );
                    }
                    CoeffKind::Op(_) => {
                        // carry nabla^{cb_A} across other's slots by Leibniz
                        for (gammas, rest, mult) in distribute(&ka.cb, kb.slots.len()) {
                            let mut slots = ka.slots.clone();
                            for (s, g) in kb.slots.iter().zip(&gammas) {
                                slots.push(s.mul(g));
                            }
                            let left =
                                WeylOp::monomial(n, twist.clone(), ka.ca.clone(), rest, rat(1));
                            let right = WeylOp::monomial(
                                n,
                                twist.clone(),
                                kb.ca.clone(),
                                kb.cb.clone(),
                                rat(1),
                            );
                            let prod = left.checked_mul(&right)?;
                            for ((pa, pb), pc) in prod.terms() {
                                out.add_term(
                                    TKey {
                                        slots: slots.clone(),
                                        ca: pa.clone(),
                                        cb: pb.clone(),
                                    },
                                    base.clone() * mult.clone() * pc.clone(),
                                );
                            }
                        }
                    }
                    CoeffKind::OpRev { .. } => {
                        // value = (q fB)(p fA) = q (fB p) fA: carry p left
                        // across other's slots with alternating signs, then
                        // multiply q * (remnant of p) in D
                        for (gammas, rest, mult) in distribute(&ka.cb, kb.slots.len()) {
                            let total: u32 = gammas.iter().map(|g| g.degree()).sum();
                            let mut slots = ka.slots.clone();
                            for (s, g) in kb.slots.iter().zip(&gammas) {
                                slots.push(s.mul(g));
                            }
                            let left = WeylOp::monomial(
                                n,
                                twist.clone(),
                                kb.ca.clone(),
                                kb.cb.clone(),
                                rat(1),
                            );
                            let right =
                                WeylOp::monomial(n, twist.clone(), ka.ca.clone(), rest, rat(1));
                            let prod = left.checked_mul(&right)?;
                            for ((pa, pb), pc) in prod.terms() {
                                out.add_term(
                                    TKey {
                                        slots: slots.clone(),
                                        ca: pa.clone(),
                                        cb: pb.clone(),
                                    },
                                    base.clone() * mult.clone() * pc.clone() * sign(total),
                                );
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Brace insertion `A{A_1, ..., A_m}`: the sum over strictly increasing
    /// slot positions with the arguments' outputs composed into the chosen
    /// slots by the Leibniz rule, signed by `(-1)^{sum i_l (j_l - 1)}` where
    /// `i_l` counts the arguments standing before insertion `l`. Arguments
    /// must be scalar-coefficient cochains; overlapping insertions are
    /// excluded, and `m` exceeding the arity yields the zero cochain. With a
    /// non-scalar receiver this is the brace module structure.
    pub fn brace(&self, args: &[&PolyDiffTensor]) -> Result<Self, AlgebraError> {
        for a in args {
            if !a.kind.is_scalar() {
                return Err(AlgebraError::CoeffMismatch(
                    "brace arguments must have scalar coefficients".into(),
                ));
            }
            if a.nvars != self.nvars {
                return Err(ArityError {
                    expected: self.nvars,
                    found: a.nvars,
                }
                .into());
            }
        }
        let m = args.len();
        let widths: Vec<usize> = args.iter().map(|a| a.arity).collect();
        let inserted: usize = widths.iter().sum();
        let out_arity = (self.arity + inserted).saturating_sub(m);
        let mut out = PolyDiffTensor::zero(self.nvars, out_arity, self.kind.clone());
        if m > self.arity {
            return Ok(out); // no admissible positions: empty sum
        }
        for pos in increasing_subsets(self.arity, m) {
            let mut eps: i64 = 0;
            for (l, &s) in pos.iter().enumerate() {
                let args_before = s as i64
                    + (0..l).map(|l2| widths[l2] as i64 - 1).sum::<i64>();
                eps += args_before * (widths[l] as i64 - 1);
            }
            let sgn = sign(eps.rem_euclid(2) as u32);
            for (key, c) in &self.terms {
                self.brace_at(&mut out, key, c.clone() * sgn.clone(), &pos, args);
            }
        }
        Ok(out)
    }

    /// Expand one receiver term against one choice of insertion positions.
    fn brace_at(
        &self,
        out: &mut PolyDiffTensor,
        key: &TKey,
        base: Rat,
        pos: &[usize],
        args: &[&PolyDiffTensor],
    ) {
        let n = self.nvars;
        let arg_choices: Vec<Vec<(&TKey, &Rat)>> =
            args.iter().map(|a| a.terms.iter().collect()).collect();
        if arg_choices.iter().any(|v| v.is_empty()) {
            return;
        }
        let mut counters = vec![0usize; args.len()];
        loop {
            let picked: Vec<(&TKey, &Rat)> = counters
                .iter()
                .zip(&arg_choices)
                .map(|(&c, v)| v[c])
                .collect();
            // états: (slots built so far, collected function monomial, coeff)
            let mut states: Vec<(Vec<Mono>, Mono, Rat)> =
                vec![(Vec::new(), Mono::zero(n), base.clone())];
            let mut pi = 0usize;
            for (s_idx, slot) in key.slots.iter().enumerate() {
                if pi < pos.len() && pos[pi] == s_idx {
                    let (akey, ac) = picked[pi];
                    let jl = akey.slots.len();
                    let mut next = Vec::new();
                    for (built, fun, c) in &states {
                        for (gammas, g0, mult) in distribute_exact(slot, jl) {
                            // g0 falls on the argument's coefficient x^{qa}
                            if !g0.le(&akey.ca) {
                                continue;
                            }
                            let mut ff = rat(1);
                            for (qi, gi) in akey.ca.0.iter().zip(&g0.0) {
                                for t in 0..*gi {
                                    ff = ff * rat((*qi - t) as i64);
                                }
                            }
                            let mut ns = built.clone();
                            for (u, g) in akey.slots.iter().zip(&gammas) {
                                ns.push(u.mul(g));
                            }
                            let nf = fun.mul(&akey.ca.checked_sub(&g0).unwrap());
                            next.push((ns, nf, c.clone() * mult * ff * (*ac).clone()));
                        }
                    }
                    states = next;
                    pi += 1;
                } else {
                    for (built, _, _) in &mut states {
                        built.push(slot.clone());
                    }
                }
            }
            for (slots, fun, c) in states {
                for (ka, kb, kc) in absorb_function(&self.kind, &key.ca, &key.cb, &fun) {
                    out.add_term(
                        TKey {
                            slots: slots.clone(),
                            ca: ka,
                            cb: kb,
                        },
                        c.clone() * kc,
                    );
                }
            }
            // advance the multi-counter
            let mut done = counters.is_empty();
            for i in (0..counters.len()).rev() {
                counters[i] += 1;
                if counters[i] < arg_choices[i].len() {
                    break;
                }
                counters[i] = 0;
                if i == 0 {
                    done = true;
                }
            }
            if done {
                break;
            }
        }
    }

    /// Bernstein weight when every term shares it.
    pub fn weight(&self) -> Option<i64> {
        let mut w = None;
        for key in self.terms.keys() {
            let tw = key.weight();
            match w {
                None => w = Some(tw),
                Some(p) if p != tw => return None,
                _ => {}
            }
        }
        w
    }

    /// Largest total derivation count over the terms.
    pub fn total_order(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| k.total_order())
            .max()
            .unwrap_or(0)
    }
}

/// Absorb a function monomial into the coefficient, kind by kind: for
/// scalars and `D_nu` the function multiplies the coefficient on the left
/// (trivially on exponents); for `D_nu^op` the coefficient multiplies the
/// function in `D`, which expands by the Leibniz rule.
fn absorb_function(kind: &CoeffKind, ca: &Mono, cb: &Mono, m: &Mono) -> Vec<(Mono, Mono, Rat)> {
    if m.is_zero() {
        return vec![(ca.clone(), cb.clone(), rat(1))];
    }
    match kind {
        CoeffKind::Scalar(_) | CoeffKind::Op(_) => vec![(ca.mul(m), cb.clone(), rat(1))],
        CoeffKind::OpRev { .. } => {
            // x^{ca} nabla^{cb} x^m = sum_e C(cb,e) C(m,e) e! x^{ca+m-e} nabla^{cb-e}
            let mut out = Vec::new();
            for e in cb.sub_indices() {
                if !e.le(m) {
                    continue;
                }
                let mut coeff = cb.binom(&e) * m.binom(&e);
                for &k in &e.0 {
                    for t in 1..=k {
                        coeff = coeff * rat(t as i64);
                    }
                }
                if is_zero(&coeff) {
                    continue;
                }
                out.push((
                    ca.mul(&m.checked_sub(&e).unwrap()),
                    cb.checked_sub(&e).unwrap(),
                    coeff,
                ));
            }
            out
        }
    }
}

/// All ways to split off ordered summands from `b`, with multinomial
/// coefficients: returns `(gammas, remainder, multinomial)`.
fn distribute(b: &Mono, parts: usize) -> Vec<(Vec<Mono>, Mono, Rat)> {
    let mut out = vec![(Vec::new(), b.clone(), rat(1))];
    for _ in 0..parts {
        let mut next = Vec::new();
        for (gs, rem, c) in &out {
            for g in rem.sub_indices() {
                let coeff = rem.binom(&g);
                let mut gs2 = gs.clone();
                gs2.push(g.clone());
                next.push((gs2, rem.checked_sub(&g).unwrap(), c.clone() * coeff));
            }
        }
        out = next;
    }
    out
}

/// Like `distribute`, with the remainder returned as the final component
/// (the part falling on a polynomial coefficient, not a slot).
fn distribute_exact(b: &Mono, parts: usize) -> Vec<(Vec<Mono>, Mono, Rat)> {
    distribute(b, parts)
}

/// Strictly increasing `m`-subsets of `0..n`.
fn increasing_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < m {
                break;
            }
            cur.push(i);
            rec(i + 1, n, m - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// Left module action of a function on a value in `P`.
fn left_act(kind: &CoeffKind, g: &Poly, v: &CochainValue) -> Result<CochainValue, AlgebraError> {
    match (kind, v) {
        (CoeffKind::Scalar(_), CochainValue::Scalar(p)) => Ok(CochainValue::Scalar(g * p)),
        (CoeffKind::Op(t), CochainValue::Op(op)) => Ok(CochainValue::Op(
            WeylOp::from_poly(g, t.clone()).checked_mul(op)?,
        )),
        (CoeffKind::OpRev { twist, .. }, CochainValue::Op(op)) => Ok(CochainValue::Op(
            op.checked_mul(&WeylOp::from_poly(g, twist.clone()))?,
        )),
        _ => Err(AlgebraError::CoeffMismatch("value/kind mismatch".into())),
    }
}

/// Right module action of a function on a value in `P`.
fn right_act(kind: &CoeffKind, v: &CochainValue, g: &Poly) -> Result<CochainValue, AlgebraError> {
    match (kind, v) {
        (CoeffKind::Scalar(_), CochainValue::Scalar(p)) => Ok(CochainValue::Scalar(p * g)),
        (CoeffKind::Op(t), CochainValue::Op(op)) => Ok(CochainValue::Op(
            op.checked_mul(&WeylOp::from_poly(g, t.clone()))?,
        )),
        (CoeffKind::OpRev { twist, .. }, CochainValue::Op(op)) => Ok(CochainValue::Op(
            WeylOp::from_poly(g, twist.clone()).checked_mul(op)?,
        )),
        _ => Err(AlgebraError::CoeffMismatch("value/kind mismatch".into())),
    }
}

struct ValueAcc {
    value: CochainValue,
}

impl ValueAcc {
    fn zero(nvars: usize, kind: &CoeffKind) -> Self {
        let value = match kind {
            CoeffKind::Scalar(_) => CochainValue::Scalar(Poly::zero(nvars)),
            CoeffKind::Op(t) => CochainValue::Op(WeylOp::zero(nvars, t.clone())),
            CoeffKind::OpRev { twist, .. } => {
                CochainValue::Op(WeylOp::zero(nvars, twist.clone()))
            }
        };
        ValueAcc { value }
    }

    fn add(&mut self, v: &CochainValue, c: Rat) {
        match (&mut self.value, v) {
            (CochainValue::Scalar(acc), CochainValue::Scalar(p)) => {
                *acc = &*acc + &p.scale(&c);
            }
            (CochainValue::Op(acc), CochainValue::Op(op)) => {
                *acc = acc.checked_add(&op.scale(&c)).expect("same twist");
            }
            _ => panic!("mixed value kinds"),
        }
    }

    fn finish(self) -> CochainValue {
        self.value
    }
}

impl fmt::Display for PolyDiffTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 {}", self.kind);
        }
        let n = self.nvars;
        let dn = |i: usize| -> String {
            if n <= 3 {
                format!("d{}", ["x", "y", "z"][i])
            } else {
                format!("d{}", i + 1)
            }
        };
        let slot_str = |m: &Mono| -> String {
            if m.is_zero() {
                return "1".to_string();
            }
            let mut parts = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(dn(i)),
                    _ => parts.push(format!("{}^{}", dn(i), e)),
                }
            }
            parts.join("*")
        };
        let mut first = true;
        for (key, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff_op = WeylOp::monomial(
                n,
                OneForm::zero(n),
                key.ca.clone(),
                key.cb.clone(),
                c.clone(),
            );
            let mut parts: Vec<String> = key.slots.iter().map(slot_str).collect();
            parts.push(format!("({})", coeff_op));
            write!(f, "[{}]", parts.join(" ⊗ "))?;
        }
        write!(f, " {}", self.kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o_kind() -> CoeffKind {
        CoeffKind::Scalar(1)
    }

    fn d_kind() -> CoeffKind {
        CoeffKind::Op(OneForm::zero(1))
    }

    fn x_poly() -> Poly {
        Poly::var(1, 0)
    }

    fn d_op() -> WeylOp {
        WeylOp::derivation(1, OneForm::zero(1), 0)
    }

    fn x_op() -> WeylOp {
        WeylOp::coordinate(1, OneForm::zero(1), 0)
    }

    #[test]
    fn canonicalization_moves_functions_right() {
        // x d (x) 1  =  d (x) x   (both evaluate to g |-> x g')
        let xd = x_op().checked_mul(&d_op()).unwrap();
        let a = PolyDiffTensor::from_raw(
            d_kind(),
            1,
            &[(
                vec![xd],
                RawCoeff::Op(WeylOp::one(1, OneForm::zero(1))),
                rat(1),
            )],
        )
        .unwrap();
        let b =
            PolyDiffTensor::from_raw(d_kind(), 1, &[(vec![d_op()], RawCoeff::Op(x_op()), rat(1))])
                .unwrap();
        assert_eq!(a, b);
        for k in 0..=4u32 {
            let g = x_poly().pow(k);
            let CochainValue::Op(v) = a.eval(&[g.clone()]).unwrap() else {
                panic!()
            };
            let expected = WeylOp::from_poly(&(&x_poly() * &g.partial(0)), OneForm::zero(1));
            assert_eq!(v, expected);
        }
    }

    #[test]
    fn canonicalization_order_zero_slot() {
        // f (x) p = 1 (x) (f p)
        let f = WeylOp::from_poly(&x_poly().pow(2), OneForm::zero(1));
        let a =
            PolyDiffTensor::from_raw(d_kind(), 1, &[(vec![f], RawCoeff::Op(d_op()), rat(1))])
                .unwrap();
        let key = a.terms().next().unwrap().0.clone();
        assert!(key.slots[0].is_zero());
        assert_eq!(key.ca, Mono(vec![2]));
    }

    #[test]
    fn canonicalization_dx_expansion() {
        // d x (x) 1 = d (x) x + 1 (x) 1
        let dx = d_op().checked_mul(&x_op()).unwrap();
        let a = PolyDiffTensor::from_raw(
            d_kind(),
            1,
            &[(
                vec![dx],
                RawCoeff::Op(WeylOp::one(1, OneForm::zero(1))),
                rat(1),
            )],
        )
        .unwrap();
        assert_eq!(a.num_terms(), 2);
        let b = PolyDiffTensor::from_raw(
            d_kind(),
            1,
            &[
                (vec![d_op()], RawCoeff::Op(x_op()), rat(1)),
                (
                    vec![WeylOp::one(1, OneForm::zero(1))],
                    RawCoeff::Op(WeylOp::one(1, OneForm::zero(1))),
                    rat(1),
                ),
            ],
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eval_examples() {
        let c = PolyDiffTensor::from_coeff(o_kind(), &RawCoeff::Scalar(x_poly().pow(2))).unwrap();
        assert_eq!(c.eval(&[]).unwrap(), CochainValue::Scalar(x_poly().pow(2)));
        let idc = PolyDiffTensor::identity_cochain(1, o_kind());
        let g = &x_poly().pow(3) + &x_poly();
        assert_eq!(idc.eval(&[g.clone()]).unwrap(), CochainValue::Scalar(g));
        // d (x) d with operator coefficient: g |-> g' d
        let a =
            PolyDiffTensor::from_raw(d_kind(), 1, &[(vec![d_op()], RawCoeff::Op(d_op()), rat(1))])
                .unwrap();
        let g = x_poly().pow(2);
        let CochainValue::Op(v) = a.eval(&[g.clone()]).unwrap() else {
            panic!()
        };
        let expected = WeylOp::from_poly(&g.partial(0), OneForm::zero(1))
            .checked_mul(&d_op())
            .unwrap();
        assert_eq!(v, expected);
    }

    #[test]
    fn differential_identity_cochain() {
        // d(1 (x) 1) = 1 (x) 1 (x) 1, i.e. (g1, g2) |-> g1 g2
        let idc = PolyDiffTensor::identity_cochain(1, o_kind());
        let d = idc.hochschild_d();
        assert_eq!(d.num_terms(), 1);
        let (key, c) = d.terms().next().unwrap();
        assert_eq!(key.slots, vec![Mono(vec![0]), Mono(vec![0])]);
        assert_eq!(c, &rat(1));
    }

    #[test]
    fn differential_arity_zero() {
        let c = PolyDiffTensor::from_coeff(o_kind(), &RawCoeff::Scalar(x_poly().pow(2))).unwrap();
        assert!(c.hochschild_d().is_zero());
        let f = PolyDiffTensor::from_coeff(
            d_kind(),
            &RawCoeff::Op(WeylOp::from_poly(&x_poly().pow(2), OneForm::zero(1))),
        )
        .unwrap();
        assert!(f.hochschild_d().is_zero());
        // d(p) = (x |-> p x - x p): for p = d this is the cochain g |-> g'
        let p = PolyDiffTensor::from_coeff(d_kind(), &RawCoeff::Op(d_op())).unwrap();
        let dp = p.hochschild_d();
        assert_eq!(dp.num_terms(), 1);
        let (key, c) = dp.terms().next().unwrap();
        assert_eq!(key.slots, vec![Mono(vec![1])]);
        assert!(key.cb.is_zero());
        assert_eq!(c, &rat(1));
    }

    #[test]
    fn d_squared_zero_smoke() {
        for kind in [
            o_kind(),
            d_kind(),
            CoeffKind::OpRev {
                twist: OneForm::zero(1),
                outer: true,
            },
        ] {
            let raw_coeff = match &kind {
                CoeffKind::Scalar(_) => RawCoeff::Scalar(x_poly().pow(2)),
                _ => RawCoeff::Op(
                    x_op()
                        .checked_mul(&d_op())
                        .unwrap()
                        .checked_mul(&d_op())
                        .unwrap(),
                ),
            };
            let a = PolyDiffTensor::from_raw(
                kind.clone(),
                2,
                &[(
                    vec![
                        d_op().checked_mul(&d_op()).unwrap(),
                        x_op().checked_mul(&d_op()).unwrap(),
                    ],
                    raw_coeff,
                    rat(1),
                )],
            )
            .unwrap();
            let dd = a.hochschild_d().hochschild_d();
            assert!(dd.is_zero(), "d^2 != 0 for kind {}", kind);
            let b = PolyDiffTensor::from_raw(
                kind.clone(),
                0,
                &[(
                    vec![],
                    match &kind {
                        CoeffKind::Scalar(_) => RawCoeff::Scalar(x_poly().pow(3)),
                        _ => RawCoeff::Op(d_op().checked_mul(&d_op()).unwrap()),
                    },
                    rat(1),
                )],
            )
            .unwrap();
            assert!(b.hochschild_d().hochschild_d().is_zero());
        }
    }

    #[test]
    fn structural_d_matches_evaluation_formula() {
        let kinds = [
            o_kind(),
            d_kind(),
            CoeffKind::OpRev {
                twist: OneForm::zero(1),
                outer: false,
            },
        ];
        for kind in kinds {
            let raw_coeff = match &kind {
                CoeffKind::Scalar(_) => RawCoeff::Scalar(x_poly().pow(2)),
                _ => RawCoeff::Op(
                    x_op()
                        .checked_mul(&d_op())
                        .unwrap()
                        .checked_mul(&d_op())
                        .unwrap(),
                ),
            };
            let a = PolyDiffTensor::from_raw(
                kind.clone(),
                1,
                &[(
                    vec![d_op().checked_mul(&d_op()).unwrap()],
                    raw_coeff,
                    rat(1),
                )],
            )
            .unwrap();
            let da = a.hochschild_d();
            for i in 0..=3u32 {
                for j in 0..=3u32 {
                    let args = [x_poly().pow(i), x_poly().pow(j)];
                    let lhs = da.eval(&args).unwrap();
                    let rhs = a.eval_formula_d(&args).unwrap();
                    assert_eq!(lhs, rhs, "kind {} at ({}, {})", kind, i, j);
                }
            }
        }
    }

    #[test]
    fn cup_sign_and_values() {
        let p = PolyDiffTensor::from_coeff(o_kind(), &RawCoeff::Scalar(x_poly())).unwrap();
        let q = PolyDiffTensor::from_coeff(o_kind(), &RawCoeff::Scalar(x_poly().pow(2))).unwrap();
        let pq = p.cup(&q).unwrap();
        assert_eq!(pq.eval(&[]).unwrap(), CochainValue::Scalar(x_poly().pow(3)));
        // two identity cochains: cup(A, B)(g1, g2) = -g1 g2
        let idc = PolyDiffTensor::identity_cochain(1, o_kind());
        let m = idc.cup(&idc).unwrap();
        let (g1, g2) = (x_poly().pow(2), x_poly().pow(3));
        assert_eq!(
            m.eval(&[g1.clone(), g2.clone()]).unwrap(),
            CochainValue::Scalar(-&(&g1 * &g2))
        );
        // even-arity pairing has positive sign
        let m2 = idc.hochschild_d();
        let mp = m2.cup(&p).unwrap();
        assert_eq!(
            mp.eval(&[g1.clone(), g2.clone()]).unwrap(),
            CochainValue::Scalar(&(&g1 * &g2) * &x_poly())
        );
    }

    #[test]
    fn cup_operator_coefficients_match_values() {
        let a =
            PolyDiffTensor::from_raw(d_kind(), 1, &[(vec![d_op()], RawCoeff::Op(d_op()), rat(1))])
                .unwrap();
        let b = PolyDiffTensor::from_raw(
            d_kind(),
            1,
            &[(
                vec![WeylOp::one(1, OneForm::zero(1))],
                RawCoeff::Op(x_op()),
                rat(1),
            )],
        )
        .unwrap();
        let c = a.cup(&b).unwrap();
        for i in 0..=3u32 {
            for j in 0..=3u32 {
                let (g1, g2) = (x_poly().pow(i), x_poly().pow(j));
                let CochainValue::Op(va) = a.eval(&[g1.clone()]).unwrap() else {
                    panic!()
                };
                let CochainValue::Op(vb) = b.eval(&[g2.clone()]).unwrap() else {
                    panic!()
                };
                let CochainValue::Op(vc) = c.eval(&[g1, g2]).unwrap() else {
                    panic!()
                };
                // sign (-1)^{1*1} = -1
                assert_eq!(vc, va.checked_mul(&vb).unwrap().scale(&rat(-1)));
            }
        }
    }

    #[test]
    fn cup_oprev_matches_values() {
        let kind = CoeffKind::OpRev {
            twist: OneForm::zero(1),
            outer: false,
        };
        let a = PolyDiffTensor::from_raw(
            kind.clone(),
            1,
            &[(vec![d_op()], RawCoeff::Op(d_op()), rat(1))],
        )
        .unwrap();
        let b = PolyDiffTensor::from_raw(
            kind.clone(),
            1,
            &[(vec![WeylOp::one(1, OneForm::zero(1))], RawCoeff::Op(x_op()), rat(1))],
        )
        .unwrap();
        let c = a.cup(&b).unwrap();
        for i in 0..=3u32 {
            for j in 0..=3u32 {
                let (g1, g2) = (x_poly().pow(i), x_poly().pow(j));
                let CochainValue::Op(va) = a.eval(&[g1.clone()]).unwrap() else {
                    panic!()
                };
                let CochainValue::Op(vb) = b.eval(&[g2.clone()]).unwrap() else {
                    panic!()
                };
                let CochainValue::Op(vc) = c.eval(&[g1, g2]).unwrap() else {
                    panic!()
                };
                // product in D^op with sign (-1)^{1*1}
                assert_eq!(vc, vb.checked_mul(&va).unwrap().scale(&rat(-1)));
            }
        }
    }

    #[test]
    fn cup_associative_mixed_arities() {
        let idc = PolyDiffTensor::identity_cochain(1, o_kind());
        let m2 = idc.hochschild_d();
        let p = PolyDiffTensor::from_coeff(o_kind(), &RawCoeff::Scalar(x_poly())).unwrap();
        for a in [&idc, &m2, &p] {
            for b in [&idc, &m2, &p] {
                for c in [&idc, &m2, &p] {
                    let left = a.cup(b).unwrap().cup(c).unwrap();
                    let right = a.cup(&b.cup(c).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn brace_examples() {
        let idc = PolyDiffTensor::identity_cochain(1, o_kind());
        let m = idc.hochschild_d(); // 1 (x) 1 (x) 1, arity 2
        assert_eq!(m.brace(&[]).unwrap(), m);
        // m{B}(a1, a2) = B(a1) a2 + a1 B(a2)
        let b = PolyDiffTensor::from_raw(
            o_kind(),
            1,
            &[(vec![d_op()], RawCoeff::Scalar(Poly::one(1)), rat(1))],
        )
        .unwrap();
        let mb = m.brace(&[&b]).unwrap();
        for i in 0..=3u32 {
            for j in 0..=3u32 {
                let (g1, g2) = (x_poly().pow(i), x_poly().pow(j));
                let CochainValue::Scalar(v) = mb.eval(&[g1.clone(), g2.clone()]).unwrap() else {
                    panic!()
                };
                let expected = &(&g1.partial(0) * &g2) + &(&g1 * &g2.partial(0));
                assert_eq!(v, expected);
            }
        }
        // arity-1 receiver with arity-2 argument: single position, sign +
        let ab = b.brace(&[&m]).unwrap();
        assert_eq!(ab.arity(), 2);
        for i in 0..=2u32 {
            for j in 0..=2u32 {
                let (g1, g2) = (x_poly().pow(i), x_poly().pow(j));
                let CochainValue::Scalar(v) = ab.eval(&[g1.clone(), g2.clone()]).unwrap() else {
                    panic!()
                };
                assert_eq!(v, (&g1 * &g2).partial(0));
            }
        }
        // arity-0 receiver: no slots
        let p = PolyDiffTensor::from_coeff(o_kind(), &RawCoeff::Scalar(x_poly())).unwrap();
        assert!(p.brace(&[&b]).unwrap().is_zero());
    }

    #[test]
    fn brace_module_identity_insertion() {
        let b = PolyDiffTensor::from_raw(
            d_kind(),
            1,
            &[(
                vec![d_op()],
                RawCoeff::Op(WeylOp::one(1, OneForm::zero(1))),
                rat(1),
            )],
        )
        .unwrap();
        let idc = PolyDiffTensor::identity_cochain(1, o_kind());
        assert_eq!(b.brace(&[&idc]).unwrap(), b);
        assert_eq!(b.brace(&[]).unwrap(), b);
        let p = PolyDiffTensor::from_coeff(d_kind(), &RawCoeff::Op(d_op())).unwrap();
        assert!(p.brace(&[&idc]).unwrap().is_zero());
    }
}
