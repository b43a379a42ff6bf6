//! Homogeneous polynomials and their symmetric multilinear forms.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

/// Number of distinct orderings of a sorted multi-index.
pub fn multiplicity(index: &[usize]) -> f64 {
    let mut m = factorial(index.len());
    let mut run = 1;
    for w in index.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            m /= factorial(run);
            run = 1;
        }
    }
    if !index.is_empty() {
        m /= factorial(run);
    }
    m.round()
}

/// All sorted multi-indices of length `degree` over `0..dim`.
pub fn sorted_multi_indices(degree: usize, dim: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, left: usize, dim: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(i, left - 1, dim, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, degree, dim, &mut Vec::with_capacity(degree), &mut out);
    out
}

/// Polynomial stored as a map from exponent vectors to coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialPolynomial {
    pub dimension: usize,
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl MonomialPolynomial {
    pub fn new(dimension: usize) -> Self {
        MonomialPolynomial {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    pub fn with_term(mut self, exponents: &[u32], coeff: f64) -> Self {
        assert_eq!(exponents.len(), self.dimension);
        *self.terms.entry(exponents.to_vec()).or_insert(0.0) += coeff;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(k, v)| v.powi(*k as i32)).product::<f64>())
            .sum()
    }

    /// Common total degree of the nonzero terms, or an error naming the
    /// first offending monomial.
    pub fn homogeneous_degree(&self, expected: usize) -> Result<()> {
        for (e, c) in &self.terms {
            let d: u32 = e.iter().sum();
            if *c != 0.0 && d as usize != expected {
                return Err(Error::NotHomogeneous {
                    degree: expected,
                    found: d as usize,
                });
            }
        }
        Ok(())
    }
}

/// Symmetric `N`-linear form `A` on `R^d`, stored by orbit: one coefficient
/// per sorted multi-index, equal to the tensor entry `A[i_1..i_N]` shared by
/// every permutation of that index. Multiplicities are applied at evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormJson", into = "FormJson")]
pub struct SymmetricForm {
    degree: usize,
    dimension: usize,
    terms: BTreeMap<Vec<usize>, f64>,
    // (index, multiplicity * coefficient) for fast diagonal evaluation
    diagonal: Vec<(Vec<usize>, f64)>,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    degree: usize,
    dimension: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    index: Vec<usize>,
    coeff: f64,
}

impl TryFrom<FormJson> for SymmetricForm {
    type Error = Error;
    fn try_from(j: FormJson) -> Result<Self> {
        SymmetricForm::from_terms(j.degree, j.dimension, j.terms.into_iter().map(|t| (t.index, t.coeff)))
    }
}

impl From<SymmetricForm> for FormJson {
    fn from(f: SymmetricForm) -> Self {
        FormJson {
            degree: f.degree,
            dimension: f.dimension,
            terms: f
                .terms
                .into_iter()
                .map(|(index, coeff)| TermJson { index, coeff })
                .collect(),
        }
    }
}

impl SymmetricForm {
    /// Builds a form from orbit coefficients. Indices are 0-based and are
    /// sorted on input; repeated orbits are summed.
    pub fn from_terms<I>(degree: usize, dimension: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        if degree == 0 || dimension == 0 {
            return Err(Error::InvalidParameter("degree and dimension must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (mut idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::ArgumentCount {
                    expected: degree,
                    got: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dimension) {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: bad + 1,
                });
            }
            idx.sort_unstable();
            *map.entry(idx).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        let diagonal = map
            .iter()
            .map(|(idx, c)| (idx.clone(), multiplicity(idx) * c))
            .collect();
        Ok(SymmetricForm {
            degree,
            dimension,
            terms: map,
            diagonal,
        })
    }

    /// The form of `Σ x_i^N`.
    pub fn power_sum(degree: usize, dimension: usize) -> Self {
        Self::from_terms(degree, dimension, (0..dimension).map(|i| (vec![i; degree], 1.0)))
            .expect("valid power sum")
    }

    /// Direct construction from monomial coefficients (`A = c / multiplicity`).
    pub fn from_polynomial_direct(p: &MonomialPolynomial, degree: usize) -> Result<Self> {
        p.homogeneous_degree(degree)?;
        let terms = p.terms.iter().map(|(e, c)| {
            let idx: Vec<usize> = e
                .iter()
                .enumerate()
                .flat_map(|(i, k)| std::iter::repeat(i).take(*k as usize))
                .collect();
            let m = multiplicity(&idx);
            (idx, c / m)
        });
        Self::from_terms(degree, p.dimension, terms)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.terms
    }

    /// Largest absolute orbit coefficient.
    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// `P(x) = A(x, …, x)`.
    pub fn eval_diagonal(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        self.diagonal
            .iter()
            .map(|(idx, c)| c * idx.iter().map(|&i| x[i]).product::<f64>())
            .sum()
    }

    /// `A(args[0], …, args[N-1])`.
    pub fn eval(&self, args: &[&[f64]]) -> Result<f64> {
        if args.len() != self.degree {
            return Err(Error::ArgumentCount {
                expected: self.degree,
                got: args.len(),
            });
        }
        if let Some(a) = args.iter().find(|a| a.len() != self.dimension) {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: a.len(),
            });
        }
        Ok(self.eval_unchecked(args))
    }

    fn eval_unchecked(&self, args: &[&[f64]]) -> f64 {
        let mut total = 0.0;
        let mut counts = vec![0usize; self.dimension];
        for (idx, c) in &self.terms {
            counts.iter_mut().for_each(|k| *k = 0);
            for &i in idx {
                counts[i] += 1;
            }
            total += c * permutation_sum(&mut counts, args, 0);
        }
        total
    }

    /// `A(x, …, x, h, …, h)` with `copies_h` copies of `h`.
    pub fn eval_mixed(&self, x: &[f64], h: &[f64], copies_h: usize) -> f64 {
        let mut args: Vec<&[f64]> = Vec::with_capacity(self.degree);
        for k in 0..self.degree {
            args.push(if k < self.degree - copies_h { x } else { h });
        }
        self.eval_unchecked(&args)
    }

    /// Second directional derivative `D²P(x)[h, h] = N(N-1) A(x, …, x, h, h)`.
    pub fn hessian_form(&self, x: &[f64], h: &[f64]) -> f64 {
        if self.degree < 2 {
            return 0.0;
        }
        let n = self.degree as f64;
        n * (n - 1.0) * self.eval_mixed(x, h, 2)
    }

    /// Monomial expansion of `P`.
    pub fn to_polynomial(&self) -> MonomialPolynomial {
        let mut p = MonomialPolynomial::new(self.dimension);
        for (idx, c) in &self.diagonal {
            let mut e = vec![0u32; self.dimension];
            for &i in idx {
                e[i] += 1;
            }
            p = p.with_term(&e, *c);
        }
        p
    }

    /// The binomial terms `P_{i,x}(h) = C(N,i) A(x^{N-i}, h^i)` for `i = 1..N-1`.
    pub fn homogeneous_terms<'a>(&'a self, x: &'a [f64]) -> Vec<HomogeneousTerm<'a>> {
        (1..self.degree)
            .map(|degree| HomogeneousTerm { form: self, base: x, degree })
            .collect()
    }
}

// Sum over distinct orderings of the multiset described by `counts` of
// prod_k args[k][slot value].
fn permutation_sum(counts: &mut [usize], args: &[&[f64]], slot: usize) -> f64 {
    if slot == args.len() {
        return 1.0;
    }
    let mut s = 0.0;
    for i in 0..counts.len() {
        if counts[i] > 0 {
            let v = args[slot][i];
            if v != 0.0 {
                counts[i] -= 1;
                s += v * permutation_sum(counts, args, slot + 1);
                counts[i] += 1;
            }
        }
    }
    s
}

/// The `i`-homogeneous piece of `h ↦ P(x + h)` at a fixed base point.
#[derive(Debug, Clone, Copy)]
pub struct HomogeneousTerm<'a> {
    form: &'a SymmetricForm,
    base: &'a [f64],
    pub degree: usize,
}

impl HomogeneousTerm<'_> {
    pub fn eval(&self, h: &[f64]) -> f64 {
        binomial(self.form.degree, self.degree) * self.form.eval_mixed(self.base, h, self.degree)
    }
}

/// Symmetric form of an `N`-homogeneous polynomial via the polarization
/// identity
///
/// ```text
/// A(v_1, …, v_N) = 1/(2^N N!) Σ_{ε ∈ {±1}^N} ε_1⋯ε_N P(ε_1 v_1 + … + ε_N v_N)
/// ```
///
/// applied to the basis vectors of every orbit.
pub fn polarize(p: &MonomialPolynomial, degree: usize) -> Result<SymmetricForm> {
    if degree == 0 {
        return Err(Error::InvalidParameter("degree must be positive".into()));
    }
    p.homogeneous_degree(degree)?;
    let d = p.dimension;
    let norm = 1.0 / (2f64.powi(degree as i32) * factorial(degree));
    let scale = p.terms.values().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut terms = Vec::new();
    let mut point = vec![0.0; d];
    for idx in sorted_multi_indices(degree, d) {
        let mut acc = 0.0;
        for mask in 0u32..(1u32 << degree) {
            point.iter_mut().for_each(|v| *v = 0.0);
            let mut sign = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    point[i] -= 1.0;
                    sign = -sign;
                } else {
                    point[i] += 1.0;
                }
            }
            acc += sign * p.eval(&point);
        }
        let a = acc * norm;
        if a.abs() > 1e-13 * scale {
            terms.push((idx, a));
        }
    }
    SymmetricForm::from_terms(degree, d, terms)
}

/// Coefficients `c_0..c_N` with `P(x + t h) = Σ c_i t^i`.
pub fn binomial_expand(form: &SymmetricForm, x: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    for v in [x, h] {
        if v.len() != form.dimension {
            return Err(Error::DimensionMismatch {
                expected: form.dimension,
                got: v.len(),
            });
        }
    }
    let n = form.degree;
    Ok((0..=n)
        .map(|i| binomial(n, i) * form.eval_mixed(x, h, i))
        .collect())
}
