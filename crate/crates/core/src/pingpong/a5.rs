//! Exact verification that `u_{2,4}(c)` and `β = 1 + (1-a)b(1+a)` in
//! `ZA5` satisfy the ping-pong hypotheses in a 4-dimensional irreducible
//! representation over `Q(ξ)`, `ξ = e^{2πi/5}`.

use std::cmp::Ordering;

use serde_json::{json, Value};

use super::cyclotomic::{bass_at_root, modulus_compare, CyclotomicNumber};
use super::linalg::{vector_json, CycloMatrix, CycloVector};
use super::stau::{check_stau, EigenPair, StauReport};
use crate::error::{Error, Result};
use crate::group_ring::GroupRingElement;
use crate::perm_group::FiniteGroup;
use crate::units::{bass_cyclic_poly, bass_unit, bicyclic_unit, UnitKind};

const N: u32 = 5;

/// Input data: `a = (1,2)(3,4)`, `b = (1,3,5)` and their images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A5Fixture {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
    /// The expected `C = BA`.
    pub c: Vec<Vec<i64>>,
    /// The expected `τ = φ((1-a)b(1+a))`.
    pub tau: Vec<Vec<i64>>,
    /// `v_0 = (ξ^{e_1}, …, ξ^{e_4})`.
    pub v0_exponents: [u64; 4],
}

impl Default for A5Fixture {
    fn default() -> Self {
        A5Fixture {
            a: vec![
                vec![0, 1, 0, 0],
                vec![1, 0, 0, 0],
                vec![0, 0, 0, 1],
                vec![0, 0, 1, 0],
            ],
            b: vec![
                vec![0, 0, 1, 0],
                vec![0, 1, 0, 0],
                vec![-1, -1, -1, -1],
                vec![0, 0, 0, 1],
            ],
            c: vec![
                vec![0, 0, 0, 1],
                vec![1, 0, 0, 0],
                vec![-1, -1, -1, -1],
                vec![0, 0, 1, 0],
            ],
            tau: vec![
                vec![-1, -1, 1, 1],
                vec![1, 1, -1, -1],
                vec![-2, -2, -3, -3],
                vec![2, 2, 3, 3],
            ],
            v0_exponents: [2, 1, 4, 3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub name: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A5Report {
    pub steps: Vec<Step>,
    /// Eigenvectors `v_1..v_4` and the eigenvalues `λ_i` of `S` on them.
    pub eigenvectors: Vec<CycloVector>,
    pub lambdas: Vec<CyclotomicNumber>,
    pub stau: StauReport,
    pub bass: String,
    pub bicyclic: String,
}

impl A5Report {
    pub fn conclusion(&self) -> String {
        format!(
            "(({})^s, ({})^t) is a free pair of ZA5 for all sufficiently large s, t",
            self.bass, self.bicyclic
        )
    }

    pub fn render(&self) -> String {
        let mut s = String::from("A5 ping-pong verification over Q(z), z = exp(2 pi i/5)\n");
        for (i, st) in self.steps.iter().enumerate() {
            s.push_str(&format!("{:>2}. [ok] {}", i + 1, st.name));
            if !st.detail.is_empty() {
                s.push_str(&format!(": {}", st.detail));
            }
            s.push('\n');
        }
        s.push_str(&self.stau.render());
        s.push_str(&format!("PASS: {}\n", self.conclusion()));
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.stau.pass,
            "steps": self.steps.iter().map(|s| json!({"name": s.name, "detail": s.detail, "ok": true})).collect::<Vec<_>>(),
            "eigenvectors": self.eigenvectors.iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
            "lambdas": self.lambdas.iter().map(CyclotomicNumber::to_json).collect::<Vec<_>>(),
            "stau": self.stau.to_json(),
            "pair": {"bass": self.bass, "bicyclic": self.bicyclic},
            "conclusion": self.conclusion(),
        })
    }
}

struct Log(Vec<Step>);

impl Log {
    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) -> Result<()> {
        if !ok {
            return Err(Error::Verification(format!("A5 step failed: {name}")));
        }
        self.0.push(Step {
            name: name.to_string(),
            detail: detail.into(),
        });
        Ok(())
    }
}

fn scale_vec(v: &[CyclotomicNumber], s: &CyclotomicNumber) -> Result<CycloVector> {
    v.iter().map(|x| x.mul(s)).collect()
}

/// Runs the case study on the built-in data.
pub fn a5_case_study() -> Result<A5Report> {
    run_case_study(&A5Fixture::default())
}

pub fn run_case_study(fx: &A5Fixture) -> Result<A5Report> {
    let mut log = Log(Vec::new());
    let one = CyclotomicNumber::one(N);
    let xi = CyclotomicNumber::zeta(N);
    let a = CycloMatrix::from_int_rows(N, &fx.a)?;
    let b = CycloMatrix::from_int_rows(N, &fx.b)?;
    let id = CycloMatrix::identity(N, 4);

    // The permutation side.
    let g = FiniteGroup::from_spec("A5")?;
    let ga = g.parse_element("(1,2)(3,4)")?;
    let gb = g.parse_element("(1,3,5)")?;
    let gc = g.mul(gb, ga);
    log.check(
        "c = ba = (1,2,3,4,5)",
        gc == g.parse_element("(1,2,3,4,5)")?,
        "",
    )?;
    log.check(
        "A^2 = B^3 = (BA)^5 = I",
        a.pow(2)? == id && b.pow(3)? == id && b.mul(&a)?.pow(5)? == id,
        "",
    )?;
    let c = b.mul(&a)?;
    log.check(
        "C = BA matches the expected matrix",
        c == CycloMatrix::from_int_rows(N, &fx.c)?,
        "",
    )?;

    // Eigenvectors of C: v_1 = v_0 and v_i = σ^{i-1}(v_0), σ: ξ ↦ ξ².
    let v0: CycloVector = fx
        .v0_exponents
        .iter()
        .map(|&e| CyclotomicNumber::zeta_pow(N, e))
        .collect();
    log.check(
        "C v0 = z v0",
        c.mul_vec(&v0)? == scale_vec(&v0, &xi)?,
        "v0 = (z^2, z, z^4, z^3)",
    )?;
    let mut vs = Vec::with_capacity(4);
    let mut v = v0.clone();
    for i in 0..4u32 {
        let e = 2u64.pow(i) % 5;
        let ok = c.mul_vec(&v)? == scale_vec(&v, &CyclotomicNumber::zeta_pow(N, e))?;
        log.check(&format!("C v{} = z^{e} v{}", i + 1, i + 1), ok, "")?;
        vs.push(v.clone());
        v = v.iter().map(|x| x.galois(2)).collect::<Result<_>>()?;
    }
    log.check(
        "v1..v4 form a basis",
        CycloMatrix::from_columns(N, 4, &vs)?.rank() == 4,
        "",
    )?;

    // S = u_{2,4}(C).
    let coeffs = bass_cyclic_poly(5, 2, 4)?;
    let mut s = CycloMatrix::zeros(N, 4, 4);
    let mut cp = id.clone();
    for k in &coeffs {
        s = s.add(&cp.scale(&CyclotomicNumber::from_integer(N, k.clone()))?)?;
        cp = cp.mul(&c)?;
    }
    let mut orbit = CycloMatrix::zeros(N, 4, 4);
    let mut cp = id.clone();
    for _ in 0..5 {
        orbit = orbit.add(&cp)?;
        cp = cp.mul(&c)?;
    }
    let alt = id
        .add(&c)?
        .pow(4)?
        .sub(&orbit.scale(&CyclotomicNumber::from_i64(N, 3))?)?;
    log.check("S = (I+C)^4 - 3(I+C+C^2+C^3+C^4)", s == alt, "")?;
    let bass_elem = bass_unit(&g, gc, 2, 4)?;
    let mut lambdas = Vec::with_capacity(4);
    for (i, v) in vs.iter().enumerate() {
        let e = 2u64.pow(i as u32) % 5;
        let lam = bass_at_root(2, 4, 5, e)?;
        let direct = one.add(&CyclotomicNumber::zeta_pow(N, e))?.pow(4);
        log.check(
            &format!("S v{} = lambda{} v{}", i + 1, i + 1, i + 1),
            s.mul_vec(v)? == scale_vec(v, &lam)? && lam == direct,
            format!("lambda{} = (1 + z^{e})^4 = {lam}", i + 1),
        )?;
        lambdas.push(lam);
    }
    log.check(
        "|lambda1| = |lambda3| > |lambda2| = |lambda4|",
        modulus_compare(&lambdas[0], &lambdas[2])? == Ordering::Equal
            && modulus_compare(&lambdas[1], &lambdas[3])? == Ordering::Equal
            && modulus_compare(&lambdas[0], &lambdas[1])? == Ordering::Greater,
        "",
    )?;

    // τ and its kernel and image.
    let tau = CycloMatrix::from_int_rows(N, &fx.tau)?;
    let derived = id.sub(&a)?.mul(&b)?.mul(&id.add(&a)?)?;
    log.check("tau = (I-A) B (I+A)", tau == derived, "")?;
    let beta = bicyclic_unit(&g, UnitKind::Beta, gb, ga, None)?;
    let ring_a = GroupRingElement::basis(&g, ga);
    let ring_b = GroupRingElement::basis(&g, gb);
    let ring_1 = GroupRingElement::one(&g);
    let nil = &(&(&ring_1 - &ring_a) * &ring_b) * &(&ring_1 + &ring_a);
    log.check(
        "beta - 1 = (1-a) b (1+a) in ZA5",
        beta.nilpotent_part() == nil,
        "",
    )?;
    log.check("tau^2 = 0", tau.mul(&tau)?.is_zero(), "")?;
    let l: Vec<CycloVector> = [[1, -1, 0, 0], [0, 0, 1, -1]]
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| CyclotomicNumber::from_i64(N, x))
                .collect()
        })
        .collect();
    let kernel = tau.kernel();
    let image = tau.image();
    let same_space = |u: &[CycloVector]| -> Result<bool> {
        let joined: Vec<CycloVector> = u.iter().chain(&l).cloned().collect();
        Ok(u.len() == 2 && CycloMatrix::from_columns(N, 4, &joined)?.rank() == 2)
    };
    log.check(
        "ker tau = Im tau = {x1 + x2 = x3 + x4 = 0}",
        same_space(&kernel)? && same_space(&image)?,
        "",
    )?;
    let tv = CycloMatrix::from_columns(N, 4, &[tau.mul_vec(&vs[0])?, tau.mul_vec(&vs[2])?])?;
    log.check(
        "d1 v1 + d2 v3 in ker tau forces d1 = d2 = 0",
        tv.rank() == 2,
        "",
    )?;

    let eig: Vec<EigenPair> = vs
        .iter()
        .zip(&lambdas)
        .map(|(v, l)| EigenPair {
            value: l.clone(),
            vector: v.clone(),
        })
        .collect();
    let stau = check_stau(&eig, &tau, Some(&s))?;
    log.check(
        "V+ = <v1, v3>, V- = <v2, v4>",
        stau.x_plus == [0, 2] && stau.x_minus == [1, 3] && stau.x_zero.is_empty(),
        "",
    )?;
    if !stau.pass {
        return Err(Error::Verification(format!(
            "ping-pong hypotheses fail:\n{}",
            stau.render()
        )));
    }
    Ok(A5Report {
        steps: log.0,
        eigenvectors: vs,
        lambdas,
        stau,
        bass: bass_elem.describe(),
        bicyclic: beta.describe(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_study_passes() {
        let r = a5_case_study().unwrap();
        assert!(r.stau.pass);
        assert_eq!(r.bass, "bass:(1,2,3,4,5):2:4");
        assert_eq!(r.bicyclic, "beta:(1,3,5):(1,2)(3,4)");
    }

    #[test]
    fn sign_flips_break_the_cross_check() {
        for i in 0..4 {
            for j in 0..4 {
                let mut fx = A5Fixture::default();
                fx.tau[i][j] = -fx.tau[i][j];
                let err = run_case_study(&fx).unwrap_err();
                assert!(err.to_string().contains("tau = (I-A) B (I+A)"), "{err}");
            }
        }
    }
}
