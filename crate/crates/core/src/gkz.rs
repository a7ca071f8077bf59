//! Euler and box operators of the A-hypergeometric system.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{GkzError, Result};
use crate::geometry::ExponentMatrix;
use crate::rational::{self, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxOperator {
    pub lambda: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerOperator {
    pub row_weights: Vec<i64>,
    #[serde(with = "crate::rational::serde_q")]
    pub gamma_shift: Q,
}

fn subscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn monomial(exponents: impl Iterator<Item = (usize, i64)>) -> String {
    let mut s = String::new();
    for (j, e) in exponents {
        s.push('∂');
        s.push_str(&subscript(j + 1));
        if e > 1 {
            s.push_str(&format!("^{e}"));
        }
    }
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

impl BoxOperator {
    pub fn is_relation_of(&self, a: &ExponentMatrix) -> bool {
        self.lambda.len() == a.num_columns()
            && (0..a.n()).all(|i| {
                (0..a.num_columns())
                    .map(|j| a.entry(i, j) as i128 * self.lambda[j] as i128)
                    .sum::<i128>()
                    == 0
            })
    }

    /// ∂^{λ⁺} − ∂^{λ⁻}, or "0" for the zero vector.
    pub fn render(&self) -> String {
        if self.lambda.iter().all(|&x| x == 0) {
            return "0".into();
        }
        let plus = monomial(self.lambda.iter().enumerate().filter(|(_, &x)| x > 0).map(|(j, &x)| (j, x)));
        let minus = monomial(self.lambda.iter().enumerate().filter(|(_, &x)| x < 0).map(|(j, &x)| (j, -x)));
        format!("{plus} − {minus}")
    }
}

/// Renders a box operator, rejecting vectors that are not nonzero relations.
pub fn render_box(lambda: &BoxOperator, a: &ExponentMatrix) -> Result<String> {
    if lambda.lambda.iter().all(|&x| x == 0) || !lambda.is_relation_of(a) {
        return Err(GkzError::NotARelation(format!("{:?}", lambda.lambda)));
    }
    Ok(lambda.render())
}

impl EulerOperator {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (j, &w) in self.row_weights.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let term = format!("x{0}∂{0}", subscript(j + 1));
            let coeff = if w.abs() == 1 { String::new() } else { w.abs().to_string() };
            if s.is_empty() {
                s = format!("{}{coeff}{term}", if w < 0 { "−" } else { "" });
            } else {
                s.push_str(&format!(" {} {coeff}{term}", if w < 0 { "−" } else { "+" }));
            }
        }
        if !self.gamma_shift.is_zero() {
            let g = rational::format(&self.gamma_shift.abs());
            if s.is_empty() {
                s = rational::format(&self.gamma_shift);
            } else {
                s.push_str(&format!(" {} {g}", if self.gamma_shift.is_negative() { "−" } else { "+" }));
            }
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }
}

pub fn euler_operators(a: &ExponentMatrix, gamma: &[Q]) -> Result<Vec<EulerOperator>> {
    if gamma.len() != a.n() {
        return Err(GkzError::ShapeMismatch(format!(
            "gamma has {} entries, expected {}",
            gamma.len(),
            a.n()
        )));
    }
    Ok(a.rows()
        .into_iter()
        .zip(gamma)
        .map(|(row_weights, g)| EulerOperator {
            row_weights,
            gamma_shift: g.clone(),
        })
        .collect())
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Row Hermite normal form: pivots move right, pivots are positive, and
/// entries above a pivot are reduced into [0, pivot).
pub fn hermite_normal_form(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        for i in r + 1..m.len() {
            if m[i][c] == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(m[r][c], m[i][c]);
            let (p, q) = (m[r][c] / g, m[i][c] / g);
            let (top, bottom) = (m[r].clone(), m[i].clone());
            for k in 0..cols {
                m[r][k] = x * top[k] + y * bottom[k];
                m[i][k] = -q * top[k] + p * bottom[k];
            }
        }
        if m[r][c] == 0 {
            continue;
        }
        if m[r][c] < 0 {
            m[r].iter_mut().for_each(|x| *x = -*x);
        }
        let piv = m[r][c];
        for i in 0..r {
            let f = m[i][c].div_euclid(piv);
            if f != 0 {
                let row = m[r].clone();
                m[i].iter_mut().zip(&row).for_each(|(x, y)| *x -= f * y);
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// A Z-basis of {λ ∈ Z^N : Aλ = 0} in Hermite normal form.
pub fn lattice_kernel(a: &ExponentMatrix) -> Vec<BoxOperator> {
    let n = a.n();
    let big_n = a.num_columns();
    let mut work: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..big_n).map(|j| a.entry(i, j) as i128).collect())
        .collect();
    // Unimodular column operations, mirrored on U, bring A to A·U = [H | 0].
    let mut u: Vec<Vec<i128>> = (0..big_n)
        .map(|i| (0..big_n).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut piv = 0;
    for row in 0..n {
        for j in piv + 1..big_n {
            if work[row][j] == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(work[row][piv], work[row][j]);
            let (p, q) = (work[row][piv] / g, work[row][j] / g);
            for mat in [&mut work, &mut u] {
                for r in mat.iter_mut() {
                    let (s, t) = (r[piv], r[j]);
                    r[piv] = x * s + y * t;
                    r[j] = -q * s + p * t;
                }
            }
        }
        if work[row][piv] != 0 {
            piv += 1;
        }
        if piv == big_n {
            break;
        }
    }
    let kernel: Vec<Vec<i128>> = (piv..big_n)
        .map(|c| (0..big_n).map(|r| u[r][c]).collect())
        .collect();
    hermite_normal_form(&kernel)
        .into_iter()
        .map(|v| BoxOperator {
            lambda: v.into_iter().map(|x| i64::try_from(x).expect("kernel entry fits in i64")).collect(),
        })
        .collect()
}

/// Whether `v` is an integer combination of a basis in Hermite normal form.
pub fn in_lattice_span(basis: &[BoxOperator], v: &[i64]) -> bool {
    let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for b in basis {
        let Some(p) = b.lambda.iter().position(|&x| x != 0) else {
            continue;
        };
        let h = b.lambda[p] as i128;
        if v[p] % h != 0 {
            return false;
        }
        let f = v[p] / h;
        v.iter_mut().zip(&b.lambda).for_each(|(x, &y)| *x -= f * y as i128);
    }
    v.iter().all(|&x| x == 0)
}
