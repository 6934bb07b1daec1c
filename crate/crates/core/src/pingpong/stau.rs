//! Checks the ping-pong hypotheses for a diagonalizable `S` and a
//! square-zero `τ`: with `V_+`, `V_-` the eigenspaces of extreme modulus
//! and `V_0` the rest, the four intersections `V_± ∩ ker τ` and
//! `Im τ ∩ (V_0 ⊕ V_±)` must be trivial.

use std::cmp::Ordering;

use serde_json::{json, Value};

use super::cyclotomic::{bass_at_root, modulus_compare, CyclotomicNumber};
use super::linalg::{intersection_witness, vector_is_zero, vector_json, CycloMatrix, CycloVector};
use crate::error::{Error, Result};

/// One eigenpair of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPair {
    pub value: CyclotomicNumber,
    pub vector: CycloVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionCheck {
    pub name: &'static str,
    pub trivial: bool,
    /// A nonzero vector in the intersection when it is not trivial.
    pub witness: Option<CycloVector>,
}

impl IntersectionCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "trivial": self.trivial,
            "witness": self.witness.as_deref().map(vector_json),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StauReport {
    /// `r_+²` and `r_-²` as exact elements of the real subfield.
    pub r_plus_sq: CyclotomicNumber,
    pub r_minus_sq: CyclotomicNumber,
    pub x_plus: Vec<usize>,
    pub x_zero: Vec<usize>,
    pub x_minus: Vec<usize>,
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub checks: Vec<IntersectionCheck>,
    pub pass: bool,
}

impl StauReport {
    pub fn to_json(&self) -> Value {
        json!({
            "r_plus_sq": self.r_plus_sq.to_json(),
            "r_minus_sq": self.r_minus_sq.to_json(),
            "x_plus": self.x_plus,
            "x_zero": self.x_zero,
            "x_minus": self.x_minus,
            "kernel_dim": self.kernel_dim,
            "image_dim": self.image_dim,
            "checks": self.checks.iter().map(IntersectionCheck::to_json).collect::<Vec<_>>(),
            "pass": self.pass,
        })
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "X+ = {:?}, X0 = {:?}, X- = {:?}; dim ker = {}, dim Im = {}\n",
            self.x_plus, self.x_zero, self.x_minus, self.kernel_dim, self.image_dim
        );
        for c in &self.checks {
            s.push_str(&format!(
                "  {:<22} {}\n",
                c.name,
                if c.trivial { "trivial" } else { "NOT trivial" }
            ));
        }
        s.push_str(if self.pass {
            "hypotheses hold\n"
        } else {
            "hypotheses fail\n"
        });
        s
    }
}

/// Groups indices into classes of equal `|λ|`, ordered by increasing modulus.
pub fn modulus_classes(values: &[CyclotomicNumber]) -> Result<Vec<Vec<usize>>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let mut placed = false;
        for class in classes.iter_mut() {
            if values[class[0]].modulus_sq() == v.modulus_sq() {
                class.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![i]);
        }
    }
    // Representatives have pairwise distinct moduli, so the sort never
    // sees a tie.
    let mut err = None;
    classes.sort_by(|a, b| match modulus_compare(&values[a[0]], &values[b[0]]) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(classes),
    }
}

/// Verifies the hypotheses for `S` given by its eigenpairs and `τ`.
/// When `s` is supplied every eigenpair is checked against it.
pub fn check_stau(
    eig: &[EigenPair],
    tau: &CycloMatrix,
    s: Option<&CycloMatrix>,
) -> Result<StauReport> {
    let n = tau.conductor();
    let dim = tau.rows();
    let pre = |m: &str| Err(Error::StauPrecondition(m.to_string()));
    if tau.cols() != dim {
        return pre("tau must be square");
    }
    if tau.is_zero() {
        return pre("tau = 0");
    }
    if !tau.mul(tau)?.is_zero() {
        return pre("tau^2 != 0");
    }
    if eig.len() != dim {
        return pre("the eigenvectors must form a basis");
    }
    let vectors: Vec<CycloVector> = eig.iter().map(|e| e.vector.clone()).collect();
    if CycloMatrix::from_columns(n, dim, &vectors)?.rank() != dim {
        return pre("the eigenvectors are linearly dependent");
    }
    if let Some(s) = s {
        for (i, e) in eig.iter().enumerate() {
            let lhs = s.mul_vec(&e.vector)?;
            let rhs: CycloVector = e
                .vector
                .iter()
                .map(|x| x.mul(&e.value))
                .collect::<Result<_>>()?;
            if lhs != rhs {
                return Err(Error::StauPrecondition(format!(
                    "eigenpair {i} is not an eigenpair of S"
                )));
            }
        }
    }
    let values: Vec<CyclotomicNumber> = eig.iter().map(|e| e.value.clone()).collect();
    let classes = modulus_classes(&values)?;
    let x_minus = classes[0].clone();
    let x_plus = classes[classes.len() - 1].clone();
    let x_zero: Vec<usize> = if classes.len() > 2 {
        classes[1..classes.len() - 1].concat()
    } else {
        Vec::new()
    };
    let span =
        |idx: &[usize]| -> Vec<CycloVector> { idx.iter().map(|&i| vectors[i].clone()).collect() };
    let v_plus = span(&x_plus);
    let v_minus = span(&x_minus);
    let v_zero = span(&x_zero);
    let kernel = tau.kernel();
    let image = tau.image();
    let with_zero = |v: &[CycloVector]| -> Vec<CycloVector> {
        let mut out = v_zero.clone();
        for x in v {
            if !out.contains(x) {
                out.push(x.clone());
            }
        }
        out
    };
    let mut checks = Vec::with_capacity(4);
    for (name, a, b) in [
        ("V+ ∩ ker τ", v_plus.clone(), kernel.clone()),
        ("V- ∩ ker τ", v_minus.clone(), kernel.clone()),
        ("Im τ ∩ (V0 ⊕ V+)", image.clone(), with_zero(&v_plus)),
        ("Im τ ∩ (V0 ⊕ V-)", image.clone(), with_zero(&v_minus)),
    ] {
        let witness = intersection_witness(n, dim, &a, &b)?;
        debug_assert!(witness.as_deref().is_none_or(|w| !vector_is_zero(w)));
        checks.push(IntersectionCheck {
            name,
            trivial: witness.is_none(),
            witness,
        });
    }
    let pass = checks.iter().all(|c| c.trivial);
    Ok(StauReport {
        r_plus_sq: values[x_plus[0]].modulus_sq(),
        r_minus_sq: values[x_minus[0]].modulus_sq(),
        x_plus,
        x_zero,
        x_minus,
        kernel_dim: kernel.len(),
        image_dim: image.len(),
        checks,
        pass,
    })
}

/// Assembles `S = diag(u_{k,m}(ζ_i))` and the rank-one `τ` with rows
/// `ζ_i - ζ_{i+1}` from character values `ζ_i = ζ_q^{e_i}`, then checks
/// the hypotheses. This is the shape of `u_{k,m}(a)` and
/// `1 + (1-x)a·x̂` in an induced representation of `A ⋊ X`.
pub fn metabelian_stau(q: u64, exponents: &[u64], k: u64, m: u64) -> Result<StauReport> {
    let p = exponents.len();
    if p < 2 {
        return Err(Error::StauPrecondition(
            "need at least two character values".into(),
        ));
    }
    let n = u32::try_from(q).map_err(|_| Error::StauPrecondition("q is too large".into()))?;
    let zetas: Vec<CyclotomicNumber> = exponents
        .iter()
        .map(|&e| CyclotomicNumber::zeta_pow(n, e))
        .collect();
    let mut tau = CycloMatrix::zeros(n, p, p);
    for i in 0..p {
        let d = zetas[i].sub(&zetas[(i + 1) % p])?;
        for j in 0..p {
            tau.set(i, j, d.clone());
        }
    }
    let mut eig = Vec::with_capacity(p);
    for (i, &e) in exponents.iter().enumerate() {
        let mut v = vec![CyclotomicNumber::zero(n); p];
        v[i] = CyclotomicNumber::one(n);
        eig.push(EigenPair {
            value: bass_at_root(k, m, q, e % q)?,
            vector: v,
        });
    }
    let values: Vec<_> = eig.iter().map(|e| e.value.clone()).collect();
    let s = CycloMatrix::diagonal(n, &values);
    check_stau(&eig, &tau, Some(&s))
}
