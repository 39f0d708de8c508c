//! Exact arithmetic in the based quantum torus `T(L, Λ)`.
//!
//! Elements are finite sums `Σ c_g(q^{1/2}) X^g` over integer exponent vectors
//! `g` of a fixed rank `m`, with multiplication `X^g X^h = q^{Λ(g,h)/2} X^{g+h}`.
//! Every q-exponent is stored as an integer count of `q^{1/2}` powers, so all
//! computations stay in `Z[q^{±1/2}]`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QTorusError {
    #[error("exponent vector has length {got}, ambient rank is {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("operands live over different skew forms")]
    FrameMismatch,
    #[error("skew form is not skew-symmetric at ({0},{1})")]
    NotSkew(usize, usize),
    #[error("exact division failed: {0}")]
    DivisionFailure(String),
    #[error("negative exponent {exp} at position {pos} on a non-monomial variable")]
    NegativeExponent { pos: usize, exp: i64 },
}

/// Laurent polynomial in `q^{1/2}` with integer coefficients.
///
/// Keys are half-power counts: the key `h` stands for `q^{h/2}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QCoeff {
    terms: BTreeMap<i64, i64>,
}

impl QCoeff {
    pub fn zero() -> Self {
        QCoeff::default()
    }

    pub fn one() -> Self {
        QCoeff::q_half(0)
    }

    /// `q^{h/2}`.
    pub fn q_half(h: i64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(h, 1);
        QCoeff { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut c = QCoeff::zero();
        for (h, v) in pairs {
            c.add_term(h, v);
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0) == Some(&1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &i64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, h: i64, v: i64) {
        if v == 0 {
            return;
        }
        let e = self.terms.entry(h).or_insert(0);
        *e += v;
        if *e == 0 {
            self.terms.remove(&h);
        }
    }

    pub fn add(&self, other: &QCoeff) -> QCoeff {
        let mut r = self.clone();
        for (&h, &v) in &other.terms {
            r.add_term(h, v);
        }
        r
    }

    pub fn neg(&self) -> QCoeff {
        QCoeff {
            terms: self.terms.iter().map(|(&h, &v)| (h, -v)).collect(),
        }
    }

    pub fn sub(&self, other: &QCoeff) -> QCoeff {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QCoeff) -> QCoeff {
        let mut r = QCoeff::zero();
        for (&h1, &v1) in &self.terms {
            for (&h2, &v2) in &other.terms {
                r.add_term(h1 + h2, v1 * v2);
            }
        }
        r
    }

    /// Multiply by `q^{h/2}`.
    pub fn shift(&self, h: i64) -> QCoeff {
        QCoeff {
            terms: self.terms.iter().map(|(&k, &v)| (k + h, v)).collect(),
        }
    }

    /// Exact division in `Z[q^{±1/2}]`; `None` when the quotient does not exist.
    pub fn divide_exact(&self, d: &QCoeff) -> Option<QCoeff> {
        if d.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut quo = QCoeff::zero();
        let (&dh, &dv) = d.terms.iter().next_back()?;
        while !rem.is_zero() {
            let (&rh, &rv) = rem.terms.iter().next_back().unwrap();
            if rv % dv != 0 {
                return None;
            }
            let ch = rh - dh;
            let cv = rv / dv;
            quo.add_term(ch, cv);
            let t = QCoeff::from_terms([(ch, cv)]);
            rem = rem.sub(&t.mul(d));
            if let Some((&nh, _)) = rem.terms.iter().next_back() {
                if nh >= rh {
                    return None;
                }
            }
        }
        Some(quo)
    }

    /// Substitute `q^{1/2} -> 1`.
    pub fn specialize_q1(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Bar involution `q^{1/2} -> q^{-1/2}`.
    pub fn bar(&self) -> QCoeff {
        QCoeff {
            terms: self.terms.iter().map(|(&h, &v)| (-h, v)).collect(),
        }
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|&v| v >= 0)
    }
}

impl fmt::Debug for QCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&h, &v) in &self.terms {
            if !first {
                write!(f, " {} ", if v < 0 { "-" } else { "+" })?;
            } else {
                if v < 0 {
                    write!(f, "-")?;
                }
                first = false;
            }
            let a = v.abs();
            if h == 0 {
                write!(f, "{a}")?;
            } else {
                if a != 1 {
                    write!(f, "{a}*")?;
                }
                if h % 2 == 0 {
                    write!(f, "q^{}", h / 2)?;
                } else {
                    write!(f, "q^{}/2", h)?;
                }
            }
        }
        Ok(())
    }
}

/// Skew-symmetric integer bilinear form on the ambient lattice.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SkewForm {
    m: usize,
    entries: Vec<i64>,
}

impl SkewForm {
    pub fn new(mat: Vec<Vec<i64>>) -> Result<Self, QTorusError> {
        let m = mat.len();
        let mut entries = vec![0i64; m * m];
        for (i, row) in mat.iter().enumerate() {
            if row.len() != m {
                return Err(QTorusError::LengthMismatch {
                    got: row.len(),
                    want: m,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                entries[i * m + j] = v;
            }
        }
        for i in 0..m {
            for j in 0..m {
                if entries[i * m + j] != -entries[j * m + i] {
                    return Err(QTorusError::NotSkew(i, j));
                }
            }
        }
        Ok(SkewForm { m, entries })
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.m + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// `Λ(g, h) = Σ g_i Λ_ij h_j`.
    pub fn eval(&self, g: &[i64], h: &[i64]) -> i64 {
        debug_assert_eq!(g.len(), self.m);
        debug_assert_eq!(h.len(), self.m);
        let mut s = 0i64;
        for (i, &gi) in g.iter().enumerate() {
            if gi == 0 {
                continue;
            }
            for (j, &hj) in h.iter().enumerate() {
                if hj != 0 {
                    s += gi * self.entry(i, j) * hj;
                }
            }
        }
        s
    }
}

/// Element of the based quantum torus over a fixed skew form.
#[derive(Clone)]
pub struct QTElement {
    form: Arc<SkewForm>,
    terms: BTreeMap<Vec<i64>, QCoeff>,
}

impl PartialEq for QTElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_frame(other) && self.terms == other.terms
    }
}
impl Eq for QTElement {}

impl QTElement {
    pub fn zero(form: Arc<SkewForm>) -> Self {
        QTElement {
            form,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(form: Arc<SkewForm>) -> Self {
        let g = vec![0; form.rank()];
        QTElement::monomial(form, g).expect("zero vector has the ambient length")
    }

    /// `X^g`, coefficient 1.
    pub fn monomial(form: Arc<SkewForm>, g: Vec<i64>) -> Result<Self, QTorusError> {
        QTElement::term(form, g, QCoeff::one())
    }

    /// `c(q^{1/2}) X^g`.
    pub fn term(form: Arc<SkewForm>, g: Vec<i64>, c: QCoeff) -> Result<Self, QTorusError> {
        if g.len() != form.rank() {
            return Err(QTorusError::LengthMismatch {
                got: g.len(),
                want: form.rank(),
            });
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g, c);
        }
        Ok(QTElement { form, terms })
    }

    pub fn form(&self) -> &Arc<SkewForm> {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &QCoeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &[i64]) -> QCoeff {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.keys().cloned().collect()
    }

    fn same_frame(&self, other: &QTElement) -> bool {
        Arc::ptr_eq(&self.form, &other.form) || self.form == other.form
    }

    pub fn add(&self, other: &QTElement) -> Result<QTElement, QTorusError> {
        if !self.same_frame(other) {
            return Err(QTorusError::FrameMismatch);
        }
        let mut r = self.clone();
        for (g, c) in &other.terms {
            r.add_term(g.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, other: &QTElement) -> Result<QTElement, QTorusError> {
        self.add(&other.scale(&QCoeff::from_terms([(0, -1)])))
    }

    pub fn scale(&self, c: &QCoeff) -> QTElement {
        let mut r = QTElement::zero(self.form.clone());
        for (g, cg) in &self.terms {
            r.add_term(g.clone(), cg.mul(c));
        }
        r
    }

    fn add_term(&mut self, g: Vec<i64>, c: QCoeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(g) {
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    /// Bilinear extension of `X^g X^h = q^{Λ(g,h)/2} X^{g+h}`.
    pub fn mul(&self, other: &QTElement) -> Result<QTElement, QTorusError> {
        if !self.same_frame(other) {
            return Err(QTorusError::FrameMismatch);
        }
        let mut r = QTElement::zero(self.form.clone());
        for (g, cg) in &self.terms {
            for (h, ch) in &other.terms {
                let twist = self.form.eval(g, h);
                let sum: Vec<i64> = g.iter().zip(h).map(|(a, b)| a + b).collect();
                r.add_term(sum, cg.mul(ch).shift(twist));
            }
        }
        Ok(r)
    }

    pub fn pow(&self, e: u32) -> Result<QTElement, QTorusError> {
        let mut r = QTElement::one(self.form.clone());
        for _ in 0..e {
            r = r.mul(self)?;
        }
        Ok(r)
    }

    /// Single-term elements with a unit coefficient (`±q^{h/2} X^g`) are the
    /// invertible monomials of the torus.
    pub fn as_unit_monomial(&self) -> Option<(Vec<i64>, i64, i64)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (g, c) = self.terms.iter().next().unwrap();
        if c.terms.len() != 1 {
            return None;
        }
        let (&h, &v) = c.terms.iter().next().unwrap();
        if v == 1 || v == -1 {
            Some((g.clone(), h, v))
        } else {
            None
        }
    }

    fn invert_unit_monomial(&self) -> Option<QTElement> {
        let (g, h, v) = self.as_unit_monomial()?;
        let ng: Vec<i64> = g.iter().map(|x| -x).collect();
        // X^g X^{-g} = X^0 since Λ(g,-g) = 0, so the inverse only flips the unit.
        Some(
            QTElement::term(self.form.clone(), ng, QCoeff::from_terms([(-h, v)]))
                .expect("length preserved"),
        )
    }

    /// Specialize `q^{1/2} -> 1`: the commutative Laurent polynomial.
    pub fn specialize_q1(&self) -> BTreeMap<Vec<i64>, i64> {
        self.terms
            .iter()
            .filter_map(|(g, c)| {
                let v = c.specialize_q1();
                (v != 0).then(|| (g.clone(), v))
            })
            .collect()
    }

    /// Bar involution applied coefficientwise (diagnostic use).
    pub fn bar(&self) -> QTElement {
        let mut r = QTElement::zero(self.form.clone());
        for (g, c) in &self.terms {
            // bar(X^g) = X^g for based monomials; only coefficients move.
            r.add_term(g.clone(), c.bar());
        }
        r
    }

    pub fn all_coefficients_nonnegative(&self) -> bool {
        self.terms.values().all(QCoeff::all_nonnegative)
    }

    /// Canonical record form: exponent vectors in lex order, q-terms ascending.
    pub fn to_records(&self) -> Vec<(Vec<i64>, Vec<(i64, i64)>)> {
        self.terms
            .iter()
            .map(|(g, c)| (g.clone(), c.terms.iter().map(|(&h, &v)| (h, v)).collect()))
            .collect()
    }

    pub fn from_records(
        form: Arc<SkewForm>,
        records: Vec<(Vec<i64>, Vec<(i64, i64)>)>,
    ) -> Result<QTElement, QTorusError> {
        let mut r = QTElement::zero(form);
        for (g, pairs) in records {
            if g.len() != r.rank() {
                return Err(QTorusError::LengthMismatch {
                    got: g.len(),
                    want: r.rank(),
                });
            }
            r.add_term(g, QCoeff::from_terms(pairs));
        }
        Ok(r)
    }
}

impl fmt::Debug for QTElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QTElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (g, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let needs_parens = c.terms.len() > 1;
            if needs_parens {
                write!(f, "({c})")?;
            } else if !c.is_one() {
                write!(f, "{c}")?;
            }
            if !c.is_one() {
                write!(f, "*")?;
            }
            write!(f, "X^(")?;
            for (i, e) in g.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// The q-normalized ordered product
/// `X^a = q^{-Σ_{i<j} a_i a_j Λ_ij / 2} X_1^{a_1} ... X_m^{a_m}`,
/// where `frame` is the skew form of the seed the exponent `a` refers to and
/// `variables` are that seed's cluster variables expressed in the initial torus.
pub fn normalized_monomial(
    frame: &SkewForm,
    a: &[i64],
    variables: &[QTElement],
) -> Result<QTElement, QTorusError> {
    if a.len() != frame.rank() || variables.len() != frame.rank() {
        return Err(QTorusError::LengthMismatch {
            got: a.len(),
            want: frame.rank(),
        });
    }
    let mut correction = 0i64;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            correction -= a[i] * a[j] * frame.entry(i, j);
        }
    }
    let form0 = variables[0].form().clone();
    let mut acc = QTElement::term(form0, vec![0; variables[0].rank()], QCoeff::q_half(correction))?;
    for (pos, (&ai, var)) in a.iter().zip(variables).enumerate() {
        if ai == 0 {
            continue;
        }
        let factor = if ai > 0 {
            var.pow(ai as u32)?
        } else {
            let inv = var
                .invert_unit_monomial()
                .ok_or(QTorusError::NegativeExponent { pos, exp: ai })?;
            inv.pow((-ai) as u32)?
        };
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// Left exact division: the unique `r` with `r * d = n`, found by
/// leading-term elimination under the lex order on exponent vectors.
pub fn exact_divide(n: &QTElement, d: &QTElement) -> Result<QTElement, QTorusError> {
    if d.is_zero() {
        return Err(QTorusError::DivisionFailure("division by zero".into()));
    }
    if !n.same_frame(d) {
        return Err(QTorusError::FrameMismatch);
    }
    let form = n.form().clone();
    let (gd, cd) = d
        .terms
        .iter()
        .next_back()
        .map(|(g, c)| (g.clone(), c.clone()))
        .expect("nonzero divisor");
    // With nonnegative coefficients nothing cancels, so the lex-minimal term
    // of an exact quotient is lexmin(n) − lexmin(d); any candidate below that
    // bound signals a non-multiple.
    let low_bound: Option<Vec<i64>> = if n.all_coefficients_nonnegative()
        && d.all_coefficients_nonnegative()
    {
        n.terms.keys().next().map(|gn_min| {
            let gd_min = d.terms.keys().next().unwrap();
            gn_min.iter().zip(gd_min).map(|(a, b)| a - b).collect()
        })
    } else {
        None
    };
    let mut rem = n.clone();
    let mut quo = QTElement::zero(form.clone());
    let mut steps = 0usize;
    while !rem.is_zero() {
        steps += 1;
        if steps > 1_000_000 {
            return Err(QTorusError::DivisionFailure(
                "descent cap exceeded; numerator is not a multiple of the divisor".into(),
            ));
        }
        let (gn, cn) = rem
            .terms
            .iter()
            .next_back()
            .map(|(g, c)| (g.clone(), c.clone()))
            .unwrap();
        let gr: Vec<i64> = gn.iter().zip(&gd).map(|(a, b)| a - b).collect();
        if let Some(lb) = &low_bound {
            if gr < *lb {
                return Err(QTorusError::DivisionFailure(format!(
                    "candidate exponent {gr:?} below the quotient bound"
                )));
            }
        }
        // r-term * lead(d) = cr * cd * q^{Λ(gr,gd)/2} X^{gn}
        let twist = form.eval(&gr, &gd);
        let cr = cn
            .divide_exact(&cd.shift(twist))
            .ok_or_else(|| QTorusError::DivisionFailure(format!(
                "leading coefficient {cn} not divisible at exponent {gn:?}"
            )))?;
        let t = QTElement::term(form.clone(), gr, cr)?;
        quo = quo.add(&t)?;
        rem = rem.sub(&t.mul(d)?)?;
    }
    Ok(quo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form2() -> Arc<SkewForm> {
        Arc::new(SkewForm::new(vec![vec![0, 1], vec![-1, 0]]).unwrap())
    }

    fn mono(f: &Arc<SkewForm>, g: &[i64]) -> QTElement {
        QTElement::monomial(f.clone(), g.to_vec()).unwrap()
    }

    #[test]
    fn monomial_identity_and_inverse() {
        let f = form2();
        let one = mono(&f, &[0, 0]);
        assert!(one.mul(&one).unwrap() == one);
        let x = mono(&f, &[1, 0]);
        let xinv = mono(&f, &[-1, 0]);
        assert_eq!(x.mul(&xinv).unwrap(), one);
        let g = mono(&f, &[2, -3]);
        let ginv = mono(&f, &[-2, 3]);
        assert_eq!(g.mul(&ginv).unwrap(), one);
    }

    #[test]
    fn commutation_relation() {
        let f = form2();
        let e1 = mono(&f, &[1, 0]);
        let e2 = mono(&f, &[0, 1]);
        // X^{e1} X^{e2} = q^{1/2} X^{e1+e2}
        let p = e1.mul(&e2).unwrap();
        let expected =
            QTElement::term(f.clone(), vec![1, 1], QCoeff::q_half(1)).unwrap();
        assert_eq!(p, expected);
        // and mul(X^g, X^h) = q^{Λ(g,h)} mul(X^h, X^g)
        let q = e2.mul(&e1).unwrap();
        assert_eq!(p, q.scale(&QCoeff::q_half(2)));
    }

    #[test]
    fn mul_bilinear_example() {
        let f = form2();
        let a = mono(&f, &[-1, 0]).add(&mono(&f, &[-1, 1])).unwrap();
        let b = mono(&f, &[1, 0]);
        let p = a.mul(&b).unwrap();
        // X^{(-1,0)}X^{(1,0)} = X^0; X^{(-1,1)}X^{(1,0)} = q^{-1/2} X^{(0,1)}
        assert_eq!(p.coeff(&[0, 0]), QCoeff::one());
        assert_eq!(p.coeff(&[0, 1]), QCoeff::q_half(-1));
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn normalized_monomial_pure_monomials() {
        let f = form2();
        let vars = vec![mono(&f, &[1, 0]), mono(&f, &[0, 1])];
        // a = e1 + e2 with Λ_12 = 1 cancels the commutation power.
        let x = normalized_monomial(&f, &[1, 1], &vars).unwrap();
        assert_eq!(x, mono(&f, &[1, 1]));
        let y = normalized_monomial(&f, &[2, 0], &vars).unwrap();
        assert_eq!(y, mono(&f, &[2, 0]));
        let z = normalized_monomial(&f, &[-1, 2], &vars).unwrap();
        assert_eq!(z, mono(&f, &[-1, 2]));
    }

    #[test]
    fn normalized_monomial_rejects_negative_on_nonmonomial() {
        let f = form2();
        let sum = mono(&f, &[1, 0]).add(&mono(&f, &[0, 1])).unwrap();
        let vars = vec![sum, mono(&f, &[0, 1])];
        let err = normalized_monomial(&f, &[-1, 0], &vars).unwrap_err();
        assert!(matches!(err, QTorusError::NegativeExponent { pos: 0, exp: -1 }));
    }

    #[test]
    fn exact_divide_roundtrip_and_failure() {
        let f = form2();
        let one = QTElement::one(f.clone());
        let b = mono(&f, &[3, -2]).add(&mono(&f, &[0, 5])).unwrap();
        assert_eq!(exact_divide(&b, &one).unwrap(), b);

        let r = mono(&f, &[1, 1])
            .add(&QTElement::term(f.clone(), vec![0, -1], QCoeff::q_half(3)).unwrap())
            .unwrap();
        let d = mono(&f, &[2, 0]).add(&mono(&f, &[-1, 2])).unwrap();
        let n = r.mul(&d).unwrap();
        assert_eq!(exact_divide(&n, &d).unwrap(), r);

        // monomials are invertible, so monomial division always succeeds
        let e1 = mono(&f, &[1, 0]);
        let e2 = mono(&f, &[0, 1]);
        let quot = exact_divide(&e1, &e2).unwrap();
        assert_eq!(quot.mul(&e2).unwrap(), e1);

        // non-unit coefficient is a genuine failure
        let d2 = e2.scale(&QCoeff::from_terms([(0, 2)]));
        assert!(matches!(
            exact_divide(&e1, &d2),
            Err(QTorusError::DivisionFailure(_))
        ));
    }

    #[test]
    fn specialize_q1_examples() {
        let f = form2();
        let g = mono(&f, &[2, -1]);
        assert_eq!(g.specialize_q1().get(&vec![2, -1]), Some(&1));
        let s = QTElement::term(
            f.clone(),
            vec![1, 0],
            QCoeff::from_terms([(1, 1), (-1, 1)]),
        )
        .unwrap();
        assert_eq!(s.specialize_q1().get(&vec![1, 0]), Some(&2));
    }

    #[test]
    fn qcoeff_division() {
        let a = QCoeff::from_terms([(2, 1), (0, 2), (-2, 1)]);
        let b = QCoeff::from_terms([(1, 1), (-1, 1)]);
        let q = a.divide_exact(&b).unwrap();
        assert_eq!(q, QCoeff::from_terms([(1, 1), (-1, 1)]));
        let c = QCoeff::from_terms([(0, 3)]);
        assert!(c.divide_exact(&QCoeff::from_terms([(0, 2)])).is_none());
    }

    #[test]
    fn serialization_roundtrip() {
        let f = form2();
        let x = QTElement::term(
            f.clone(),
            vec![-1, 2],
            QCoeff::from_terms([(-3, 2), (1, 1)]),
        )
        .unwrap()
        .add(&mono(&f, &[0, 0]))
        .unwrap();
        let rec = x.to_records();
        let y = QTElement::from_records(f, rec).unwrap();
        assert_eq!(x, y);
    }
}
