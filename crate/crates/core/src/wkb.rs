//! WKB coefficient tables.
//!
//! The large-`nu` expansion of the log-derivative of the radial solution is
//! `S = nu S_{-1} + S_0 + sum_i S_i nu^{-i}` with `S_{-1} = +-1/y`, where
//! `y = (z^2 + f^-2)^{-1/2}`. Each `S_i` is a [`YPoly`] whose `y^{2k+i}`
//! coefficient is `F_{k,i}`. The recursion runs directly on these y-polynomials,
//! so the quadratic convolution is a plain polynomial product.
//!
//! The zero-mode sector (`nu = 0`, expansion in `1/z`) uses the same machinery
//! with y-independent coefficients.

use crate::diffpoly::{
    log_derivative_times_d, rat, series_log, DiffMonomial, DiffPoly, DimPoly, NuSeries, YPoly,
};

fn f10() -> DiffPoly {
    DiffPoly::term(DimPoly::from_ratios(&[(1, 2)]), DiffMonomial::new(-3, &[(1, 1)]))
}

/// `W = (d/2) f''/f + d(d-2)/4 f'^2/f^2`, the potential of the Liouville-normal form.
fn liouville_potential() -> DiffPoly {
    let half_d = DimPoly::from_ratios(&[(0, 1), (1, 2)]);
    let quad = DimPoly::from_ratios(&[(0, 1), (-1, 2), (1, 4)]);
    &DiffPoly::term(half_d, DiffMonomial::new(-1, &[(2, 1)]))
        + &DiffPoly::term(quad, DiffMonomial::new(-2, &[(1, 2)]))
}

/// Branch of the leading WKB term, `S_{-1} = sign / y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// `S_0, S_1, ..., S_max` on the chosen branch.
pub fn s_series(max_order: usize, branch: Branch) -> Vec<YPoly> {
    let factor = match branch {
        Branch::Plus => rat(-1, 2),
        Branch::Minus => rat(1, 2),
    };
    let mut s = vec![YPoly::monomial(2, f10())];
    let potential = YPoly::constant(-&liouville_potential());
    for i in 0..max_order {
        let mut bracket = s[i].r_derivative();
        for n in 0..=i {
            bracket = &bracket + &(&s[n] * &s[i - n]);
        }
        if i == 0 {
            bracket = &bracket + &potential;
        }
        s.push(bracket.shift(1).scale(&factor));
    }
    s
}

/// `F_{k,i}` for `0 <= i <= max_order`, `0 <= k <= i+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FTable {
    max_order: usize,
    s_plus: Vec<YPoly>,
}

impl FTable {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `F_{k,i}`; zero outside `0 <= k <= i+1`.
    ///
    /// # Panics
    /// If `i` exceeds the computed order.
    pub fn get(&self, k: usize, i: usize) -> DiffPoly {
        assert!(i <= self.max_order, "F table computed to order {}, asked {i}", self.max_order);
        self.s_plus[i].coeff(2 * k + i)
    }

    /// `S_i^+` as a polynomial in `y`.
    pub fn s(&self, i: usize) -> &YPoly {
        &self.s_plus[i]
    }

    /// `(k, i, F_{k,i})` in table order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, DiffPoly)> + '_ {
        (0..=self.max_order).flat_map(move |i| (0..=i + 1).map(move |k| (k, i, self.get(k, i))))
    }
}

/// Builds the `F` table to the given order.
pub fn compute_f(max_order: usize) -> FTable {
    FTable {
        max_order,
        s_plus: s_series(max_order, Branch::Plus),
    }
}

/// `Omega_{k,i}` for `1 <= i <= max_i`, `0 <= k <= 2i`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaTable {
    max_i: usize,
    cumulant: NuSeries,
}

impl OmegaTable {
    pub fn max_i(&self) -> usize {
        self.max_i
    }

    pub fn get(&self, k: usize, i: usize) -> DiffPoly {
        assert!(i >= 1 && i <= self.max_i, "Omega index {i} outside 1..={}", self.max_i);
        self.cumulant.coeff(2 * i).coeff(2 * k + 2 * i)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, DiffPoly)> + '_ {
        (1..=self.max_i).flat_map(move |i| (0..=2 * i).map(move |k| (k, i, self.get(k, i))))
    }
}

/// Cumulants of `ln[1 + sum_j nu^{-2j} y S_{2j-1}]`.
pub fn compute_omega_from(f: &FTable, max_i: usize) -> OmegaTable {
    assert!(
        f.max_order() + 1 >= 2 * max_i,
        "Omega to order {max_i} needs F to order {}",
        2 * max_i - 1
    );
    let order = 2 * max_i;
    let mut eps = NuSeries::zero(order);
    for j in 1..=max_i {
        eps.set_coeff(2 * j, f.s(2 * j - 1).shift(1));
    }
    OmegaTable {
        max_i,
        cumulant: series_log(&eps).expect("odd-F series has no constant term"),
    }
}

pub fn compute_omega(max_i: usize) -> OmegaTable {
    compute_omega_from(&compute_f(2 * max_i.max(1) - 1), max_i)
}

/// Neumann boundary cumulants `Q^-_{k,i}` (at `a`) and `Q^+_{k,i}` (at `b`), `0 <= k <= i`.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    max_i: usize,
    minus: NuSeries,
    plus: NuSeries,
}

impl QTable {
    pub fn max_i(&self) -> usize {
        self.max_i
    }

    pub fn minus(&self, k: usize, i: usize) -> DiffPoly {
        self.minus.coeff(i).coeff(2 * k + i)
    }

    pub fn plus(&self, k: usize, i: usize) -> DiffPoly {
        self.plus.coeff(i).coeff(2 * k + i)
    }
}

/// `U^-_{k,i}` and `U^+_{k,i}` packed as y-polynomials `sigma_i`.
pub fn sigma_series(f: &FTable, max_i: usize) -> (Vec<YPoly>, Vec<YPoly>) {
    let half_u = log_derivative_times_d().scale(&rat(1, 2));
    let mut minus = Vec::with_capacity(max_i + 1);
    let mut plus = Vec::with_capacity(max_i + 1);
    for i in 0..=max_i {
        if i == 0 {
            minus.push(&YPoly::constant(half_u.clone()) - f.s(0));
            plus.push(f.s(0) - &YPoly::constant(half_u.clone()));
        } else {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            minus.push(f.s(i).scale(&rat(sign, 1)));
            plus.push(f.s(i).clone());
        }
    }
    (minus, plus)
}

pub fn compute_q_from(f: &FTable, max_i: usize) -> QTable {
    assert!(max_i >= 1 && f.max_order() + 1 >= max_i);
    let (sm, sp) = sigma_series(f, max_i - 1);
    let build = |sigma: &[YPoly]| {
        let mut eps = NuSeries::zero(max_i);
        for k in 1..=max_i {
            eps.set_coeff(k, sigma[k - 1].shift(1));
        }
        series_log(&eps).expect("sigma series has no constant term")
    };
    QTable {
        max_i,
        minus: build(&sm),
        plus: build(&sp),
    }
}

pub fn compute_q(max_i: usize) -> QTable {
    compute_q_from(&compute_f(max_i.max(1)), max_i)
}

/// Zero-mode (`nu = 0`) tables: `P_i^+`, `T_i`, `D_i^-` and `D_i^+`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroModeTables {
    max_i: usize,
    p: Vec<DiffPoly>,
    t: NuSeries,
    dminus: NuSeries,
    dplus: NuSeries,
}

fn constant_coeff(series: &NuSeries, i: usize) -> DiffPoly {
    series.coeff(i).coeff(0)
}

impl ZeroModeTables {
    pub fn max_i(&self) -> usize {
        self.max_i
    }

    /// `P_i^+`, with `P_0 = 0`.
    pub fn p(&self, i: usize) -> &DiffPoly {
        &self.p[i]
    }

    /// `P_i^- = (-1)^i P_i^+`.
    pub fn p_minus(&self, i: usize) -> DiffPoly {
        if i.is_multiple_of(2) {
            self.p[i].clone()
        } else {
            -&self.p[i]
        }
    }

    /// `T_i`, coefficient of `z^{-2i}`; defined for `2i <= max_i`.
    pub fn t(&self, i: usize) -> DiffPoly {
        constant_coeff(&self.t, 2 * i)
    }

    pub fn d_minus(&self, i: usize) -> DiffPoly {
        constant_coeff(&self.dminus, i)
    }

    pub fn d_plus(&self, i: usize) -> DiffPoly {
        constant_coeff(&self.dplus, i)
    }
}

/// `P_i^+` from `P_{i+1} = -(1/2)[P_i' + sum_{m=0}^{i} P_m P_{i-m}]`.
pub fn p_series(max_i: usize) -> Vec<DiffPoly> {
    let mut p = vec![DiffPoly::zero(), liouville_potential().scale(&rat(1, 2))];
    for i in 1..max_i {
        let mut bracket = p[i].derivative();
        for m in 0..=i {
            bracket = &bracket + &(&p[m] * &p[i - m]);
        }
        p.push(bracket.scale(&rat(-1, 2)));
    }
    p.truncate(max_i + 1);
    p
}

pub fn compute_zero_mode(max_i: usize) -> ZeroModeTables {
    let max_i = max_i.max(1);
    let p = p_series(max_i);
    let constant = |c: DiffPoly| YPoly::constant(c);

    let mut t_eps = NuSeries::zero(max_i);
    for k in 1..=max_i.div_ceil(2) {
        if 2 * k <= max_i {
            t_eps.set_coeff(2 * k, constant(p[2 * k - 1].clone()));
        }
    }

    let half_u = log_derivative_times_d().scale(&rat(1, 2));
    let mut dm = NuSeries::zero(max_i);
    let mut dp = NuSeries::zero(max_i);
    dm.set_coeff(1, constant(half_u.clone()));
    dp.set_coeff(1, constant(-&half_u));
    for (i, pi) in p.iter().enumerate().take(max_i).skip(1) {
        let pm = if i % 2 == 0 { pi.clone() } else { -pi };
        dm.set_coeff(i + 1, constant(-&pm));
        dp.set_coeff(i + 1, constant(pi.clone()));
    }
    let log = |s: &NuSeries| series_log(s).expect("zero-mode series has no constant term");
    ZeroModeTables {
        max_i,
        t: log(&t_eps),
        dminus: log(&dm),
        dplus: log(&dp),
        p,
    }
}

/// Outcome of the symbolic parity checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityReport {
    /// Highest `S_i` order compared.
    pub max_order: usize,
    /// Orders `i` with `S_i^- != (-1)^i S_i^+`.
    pub s_violations: Vec<usize>,
    /// Indices `2i` with a nonzero even boundary cumulant `D_{2i}`.
    pub even_cumulant_violations: Vec<usize>,
}

impl ParityReport {
    pub fn holds(&self) -> bool {
        self.s_violations.is_empty() && self.even_cumulant_violations.is_empty()
    }
}

fn parity_of(plus: &[YPoly], minus: &[YPoly]) -> Vec<usize> {
    (1..plus.len())
        .filter(|&i| {
            let expected = if i % 2 == 0 {
                plus[i].clone()
            } else {
                -&plus[i]
            };
            minus[i] != expected
        })
        .collect()
}

fn cumulants_of(plus: &[YPoly], minus: &[YPoly]) -> Vec<YPoly> {
    let top = plus.len() - 1;
    let mut eps = NuSeries::zero(top + 1);
    for k in 1..=top {
        let omega = &plus[k] - &minus[k];
        eps.set_coeff(k + 1, omega.shift(1).scale(&rat(1, 2)));
    }
    let log = series_log(&eps).expect("omega series has no constant term");
    (1..=top).map(|i| log.coeff(i + 1).clone()).collect()
}

/// Indices `i in 1..=max_order` where `S_i^- != (-1)^i S_i^+` (empty when parity holds).
pub fn parity_violations(max_order: usize) -> Vec<usize> {
    parity_of(&s_series(max_order, Branch::Plus), &s_series(max_order, Branch::Minus))
}

/// `D_1, ..., D_{2 max_i}` of `ln[1 + (y/2) sum_k omega_k nu^{-(k+1)}]`, index `i`
/// at position `i - 1`, where `omega_k = S_k^+ - S_k^-`.
pub fn boundary_cumulants(max_i: usize) -> Vec<YPoly> {
    let top = 2 * max_i;
    cumulants_of(&s_series(top, Branch::Plus), &s_series(top, Branch::Minus))
}

/// Checks `S_i^- = (-1)^i S_i^+` for `i <= 2 max_i` and `D_{2i} = 0` for `i <= max_i`.
pub fn check_parity(max_i: usize) -> ParityReport {
    let top = 2 * max_i;
    let plus = s_series(top, Branch::Plus);
    let minus = s_series(top, Branch::Minus);
    let d = cumulants_of(&plus, &minus);
    ParityReport {
        max_order: top,
        s_violations: parity_of(&plus, &minus),
        even_cumulant_violations: (1..=max_i)
            .map(|i| 2 * i)
            .filter(|&j| !d[j - 1].is_zero())
            .collect(),
    }
}

/// One line per entry: `F[k,i] = <canonical form>`.
pub fn format_f_table(f: &FTable) -> String {
    let mut out = String::new();
    for (k, i, p) in f.entries() {
        out.push_str(&format!("F[{k},{i}] = {p}\n"));
    }
    out
}

/// One line per entry: `Omega[k,i] = <canonical form>`.
pub fn format_omega_table(om: &OmegaTable) -> String {
    let mut out = String::new();
    for (k, i, p) in om.entries() {
        out.push_str(&format!("Omega[{k},{i}] = {p}\n"));
    }
    out
}
