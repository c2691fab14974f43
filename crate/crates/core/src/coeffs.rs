//! Exact coefficient families of the phase, inverse-phase and Airy-zero
//! expansions.
//!
//! * `m_n` — modulus expansion `(pi/2) z M^2 ~ 1 + sum m_n z^{-2n}`
//! * `t_n` — phase expansion `theta ~ z - (nu/2 + 1/4) pi + sum t_n z^{1-2n}`
//! * `t_k^{(n)}` — coefficients of `(1 + sum t_k z^{-2k})^{2n-1}`
//! * `c_n` — McMahon coefficients, obtained by formal inversion
//! * `T_n` — Airy-zero coefficients, rational numbers
//!
//! All tables are built on demand and memoized in a process-wide cache.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::exact::{binomial, PolyMu};

#[derive(Default)]
struct Tables {
    m: Vec<PolyMu>,
    t: Vec<PolyMu>,
    c: Vec<PolyMu>,
    m_third: Vec<Rational>,
    t_third: Vec<Rational>,
    c_third: Vec<Rational>,
    airy: Vec<Rational>,
    power_rows: HashMap<usize, Vec<PolyMu>>,
}

fn tables() -> &'static Mutex<Tables> {
    static TABLES: OnceLock<Mutex<Tables>> = OnceLock::new();
    TABLES.get_or_init(|| Mutex::new(Tables::default()))
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

impl Tables {
    fn m(&mut self, n: usize) -> PolyMu {
        while self.m.len() < n {
            let k = self.m.len() + 1;
            self.m.push(modulus_coeff_direct(k));
        }
        self.m[n - 1].clone()
    }

    fn t(&mut self, n: usize) -> PolyMu {
        while self.t.len() < n {
            let n = self.t.len() + 1;
            let odd = 2 * n as i64 - 1;
            let mut acc = self.m(n).scale(&ratio(1, odd));
            for k in 1..n {
                let mk = self.m(n - k);
                let prod = &self.t[k - 1] * &mk;
                acc = &acc - &prod.scale(&ratio(2 * k as i64 - 1, odd));
            }
            self.t.push(acc);
        }
        self.t[n - 1].clone()
    }

    fn power_row(&mut self, n: usize) -> &[PolyMu] {
        if !self.power_rows.contains_key(&n) {
            let p = 2 * n as i64 - 1;
            let mut row: Vec<PolyMu> = Vec::with_capacity(n);
            for k in 1..=n {
                let mut acc = self.t(k).scale(&ratio(p, 1));
                for j in 1..k {
                    let w = ratio(2 * (n * j) as i64 - k as i64, k as i64);
                    let prod = &self.t(j) * &row[k - j - 1];
                    acc = &acc + &prod.scale(&w);
                }
                row.push(acc);
            }
            self.power_rows.insert(n, row);
        }
        &self.power_rows[&n]
    }

    fn power(&mut self, n: usize, k: usize) -> PolyMu {
        if k <= n {
            return self.power_row(n)[k - 1].clone();
        }
        // Rows beyond the diagonal are rarely needed and not cached.
        let p = 2 * n as i64 - 1;
        let mut row: Vec<PolyMu> = Vec::with_capacity(k);
        for kk in 1..=k {
            let mut acc = self.t(kk).scale(&ratio(p, 1));
            for j in 1..kk {
                let w = ratio(2 * (n * j) as i64 - kk as i64, kk as i64);
                acc = &acc + &(&self.t(j) * &row[kk - j - 1]).scale(&w);
            }
            row.push(acc);
        }
        row.pop().expect("k >= 1")
    }

    fn c(&mut self, n: usize) -> PolyMu {
        while self.c.len() < n {
            let k = self.c.len() + 1;
            let diag = self.power_row(k)[k - 1].clone();
            self.c.push(diag.scale(&ratio(1, 1 - 2 * k as i64)));
            // Rows are only needed for their diagonal entry.
            self.power_rows.remove(&k);
        }
        self.c[n - 1].clone()
    }

    /// `c_n(1/3)` computed with numbers instead of polynomials.
    fn c_third(&mut self, n: usize) -> Rational {
        let mu = ratio(1, 9);
        while self.m_third.len() < n {
            let k = self.m_third.len() + 1;
            self.m_third.push(modulus_coeff_direct(k).eval_mu(&mu));
        }
        while self.t_third.len() < n {
            let k = self.t_third.len() + 1;
            let odd = 2 * k as i64 - 1;
            let mut acc = Rational::from(&self.m_third[k - 1] / odd);
            for j in 1..k {
                let prod = Rational::from(&self.t_third[j - 1] * &self.m_third[k - j - 1]);
                acc -= prod * ratio(2 * j as i64 - 1, odd);
            }
            self.t_third.push(acc);
        }
        while self.c_third.len() < n {
            let k = self.c_third.len() + 1;
            let p = 2 * k as i64 - 1;
            let mut row: Vec<Rational> = Vec::with_capacity(k);
            for kk in 1..=k {
                let mut acc = Rational::from(&self.t_third[kk - 1] * p);
                for j in 1..kk {
                    let w = ratio(2 * (k * j) as i64 - kk as i64, kk as i64);
                    acc += Rational::from(&self.t_third[j - 1] * &row[kk - j - 1]) * w;
                }
                row.push(acc);
            }
            let diag = row.pop().expect("k >= 1");
            self.c_third.push(diag / -p);
        }
        self.c_third[n - 1].clone()
    }

    fn airy(&mut self, n: usize) -> Rational {
        while self.airy.len() < n {
            let n = self.airy.len() + 1;
            // Power 2/3 of 1 + sum a_k w^{-2k}, a_k = (3/2)^{2k} c_k(1/3):
            // T_n = (1/n) sum_{k=1}^{n} ((5k - 3n)/3) a_k T_{n-k}, T_0 = 1.
            let mut acc = Rational::new();
            for k in 1..=n {
                let a_k = self.c_third(k) * Rational::from((Integer::from(9).pow(k as u32), Integer::from(4).pow(k as u32)));
                let t_prev = if k == n { Rational::from(1) } else { self.airy[n - k - 1].clone() };
                acc += ratio(5 * k as i64 - 3 * n as i64, 3) * a_k * t_prev;
            }
            acc /= n as u32;
            self.airy.push(acc);
        }
        self.airy[n - 1].clone()
    }
}

fn modulus_coeff_direct(n: usize) -> PolyMu {
    let n32 = n as u32;
    let scale = Rational::from((binomial(2 * n32, n32), Integer::from(16).pow(n32)));
    let mut p = PolyMu::constant(Rational::from(1));
    for k in 1..=n as i64 {
        let odd = 2 * k - 1;
        p = &p * &PolyMu::from_coeffs(vec![Rational::from(-odd * odd), Rational::from(4)]);
    }
    p.scale(&scale)
}

/// `m_n(nu) = 16^{-n} C(2n, n) prod_{k=1}^{n} (4 mu - (2k-1)^2)`.
pub fn modulus_coeff(n: usize) -> PolyMu {
    assert!(n >= 1, "coefficient index starts at 1");
    tables().lock().unwrap().m(n)
}

/// Phase coefficient `t_n(nu)`.
pub fn phase_coeff(n: usize) -> PolyMu {
    assert!(n >= 1, "coefficient index starts at 1");
    tables().lock().unwrap().t(n)
}

/// Closed form of the leading coefficient of `t_n`:
/// `tau_n = C(2n, n) / ((2n-1)^2 4^n)`.
pub fn leading_tau(n: usize) -> Rational {
    assert!(n >= 1, "coefficient index starts at 1");
    let n32 = n as u32;
    let odd = Integer::from(2 * n as u64 - 1);
    let den = Integer::from(&odd * &odd) * Integer::from(4).pow(n32);
    Rational::from((binomial(2 * n32, n32), den))
}

/// Coefficient of `z^{-2k}` in `(1 + sum_j t_j z^{-2j})^{2n-1}`.
pub fn power_phase_coeff(n: usize, k: usize) -> PolyMu {
    assert!(n >= 1 && k >= 1, "indices start at 1");
    tables().lock().unwrap().power(n, k)
}

/// McMahon coefficient `c_n(nu) = t_n^{(n)}(nu) / (1 - 2n)`.
pub fn mcmahon_coeff(n: usize) -> PolyMu {
    assert!(n >= 1, "coefficient index starts at 1");
    tables().lock().unwrap().c(n)
}

/// Airy-zero coefficient `T_n`.
pub fn airy_coeff(n: usize) -> Rational {
    assert!(n >= 1, "coefficient index starts at 1");
    tables().lock().unwrap().airy(n)
}

/// The coefficient families that can be tabulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Family {
    /// Modulus coefficients `m_n`.
    M,
    /// Phase coefficients `t_n`.
    T,
    /// McMahon coefficients `c_n`.
    C,
    /// Airy-zero coefficients `T_n`.
    Airy,
}

impl std::str::FromStr for Family {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "m" => Ok(Family::M),
            "t" => Ok(Family::T),
            "c" => Ok(Family::C),
            "T" => Ok(Family::Airy),
            other => Err(crate::Error::Domain(format!("unknown coefficient family `{other}` (expected m, t, c or T)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entry {
    Poly(PolyMu),
    Rational(Rational),
}

/// Entries `1..=max_n` of one coefficient family.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    pub family: Family,
    pub entries: Vec<Entry>,
}

impl CoefficientTable {
    pub fn build(family: Family, max_n: usize) -> Self {
        let mut tab = tables().lock().unwrap();
        let entries = (1..=max_n)
            .map(|n| match family {
                Family::M => Entry::Poly(tab.m(n)),
                Family::T => Entry::Poly(tab.t(n)),
                Family::C => Entry::Poly(tab.c(n)),
                Family::Airy => Entry::Rational(tab.airy(n)),
            })
            .collect();
        CoefficientTable { family, entries }
    }

    pub fn max_n(&self) -> usize {
        self.entries.len()
    }

    /// Entry `n` (1-based).
    pub fn get(&self, n: usize) -> Option<&Entry> {
        n.checked_sub(1).and_then(|i| self.entries.get(i))
    }
}

/// Polynomial evaluation of the first `count` coefficients of a family at
/// an exact order `nu`. Airy coefficients do not depend on the order.
pub fn eval_family(family: Family, nu: &Rational, count: usize) -> Vec<Rational> {
    let table = CoefficientTable::build(family, count);
    table
        .entries
        .iter()
        .map(|e| match e {
            Entry::Poly(p) => p.eval(nu),
            Entry::Rational(q) => q.clone(),
        })
        .collect()
}
