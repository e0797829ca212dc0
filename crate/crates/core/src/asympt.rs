//! Leading asymptotics near a Landau stratum: residue reduction, exponent,
//! transverse quadratic form and leading coefficient.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use statrs::function::gamma::gamma;
use thiserror::Error;

use crate::diagram::{eps_symbol, transverse_symbol, Diagram, DiagramError, Dimension};
use crate::exactalg::{det_alg, Alg, ExactError, Poly, RatFunc};
use crate::landau::{frame_volume, landau_from_pinch, LandauError, LandauPolynomial};
use crate::pinch::{propagator_at, propagator_momentum_at, PinchError, PinchSolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptError {
    #[error("pinch is not finite: {0}")]
    NotFinite(String),
    #[error("normal form failure at propagator {prop}: {msg}")]
    NormalFormFailure { prop: usize, msg: String },
    #[error("singular linear part: {0}")]
    SingularLinearPart(String),
    #[error("not a one-loop subset: {0}")]
    NotOneLoopSubset(String),
    #[error(transparent)]
    Landau(#[from] LandauError),
    #[error(transparent)]
    Pinch(#[from] PinchError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn require_finite(sol: &PinchSolution) -> Result<(), AsymptError> {
    if sol.is_finite() {
        Ok(())
    } else {
        Err(AsymptError::NotFinite(format!("subset {:?} is {:?}", sol.subset, sol.classification)))
    }
}

/// nu = (d * loops - rank)/2 - 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exponent {
    pub loops: usize,
    pub rank: usize,
    pub dimension: Dimension,
}

impl Exponent {
    pub fn new(loops: usize, rank: usize, dimension: Dimension) -> Self {
        Exponent { loops, rank, dimension }
    }

    /// Exact value at integer d.
    pub fn at(&self, d: i64) -> BigRational {
        BigRational::new((d * self.loops as i64 - self.rank as i64 - 2).into(), 2.into())
    }

    pub fn value(&self) -> Option<BigRational> {
        match self.dimension {
            Dimension::Int(d) => Some(self.at(d)),
            Dimension::Symbolic => None,
        }
    }

    /// Transverse dimension n = d * loops - rank, at integer d.
    pub fn transverse_dim(&self, d: i64) -> i64 {
        d * self.loops as i64 - self.rank as i64
    }

    pub fn is_logarithmic(&self) -> bool {
        self.value().map(|v| v.is_zero()).unwrap_or(false)
    }

    /// Symbolic form in d, regardless of the configured dimension.
    pub fn symbolic(&self) -> String {
        let (l, r) = (self.loops as i64, self.rank as i64);
        if l == 1 {
            return format!("-1+(d-{})/2", r);
        }
        if l % 2 == 0 && r % 2 == 0 {
            let c = l / 2;
            let k = (r + 2) / 2;
            let lead = if c == 1 { "d".to_string() } else { format!("{}*d", c) };
            return format!("{}-{}", lead, k);
        }
        format!("-1+({}*d-{})/2", l, r)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{}", v),
            None => f.write_str(&self.symbolic()),
        }
    }
}

/// Local normal form of the subset propagators near the pinch:
/// P_i = c_i + l_i . x + Q_i(q_perp) + (quadratic in x).
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    /// Propagator values at the pinch (the deformation term).
    pub c: Vec<Alg>,
    /// Gradients along the parallel frame vectors (covariant components).
    pub l_cov: Vec<Vec<Alg>>,
    /// Transverse quadratic parts, linear in the transverse symbols.
    pub quad: Vec<Poly>,
}

pub fn normal_form(d: &Diagram, sol: &PinchSolution, branch: usize) -> Result<NormalForm, AsymptError> {
    require_finite(sol)?;
    let alpha = sol.alpha(branch);
    let mut dirs = Vec::new();
    for &a in &sol.involved_loops {
        for f in &sol.frames[a] {
            dirs.push((a, f.iter().map(|c| Alg::from_rational(c.clone())).collect::<Vec<_>>()));
        }
    }
    if dirs.len() + 1 != sol.subset.len() {
        return Err(AsymptError::NormalFormFailure {
            prop: sol.subset[0],
            msg: format!("{} propagators against {} parallel directions", sol.subset.len(), dirs.len()),
        });
    }
    let mut nf = NormalForm { c: Vec::new(), l_cov: Vec::new(), quad: Vec::new() };
    for &i in &sol.subset {
        let p = &d.propagators[i];
        let k = propagator_momentum_at(d, i, alpha);
        nf.c.push(propagator_at(d, i, alpha)?);
        let mut row = Vec::new();
        for (a, f) in &dirs {
            let r = p.routing[*a];
            row.push(if r == 0 { Alg::zero() } else { &d.ext_dot(&k, f)? * &Alg::from_int(2 * r) });
        }
        nf.l_cov.push(row);
        let mut qd = Poly::zero();
        let touched = p.loops_touched();
        for (x, &a) in touched.iter().enumerate() {
            for &b in &touched[x..] {
                let c = p.routing[a] * p.routing[b] * if a == b { 1 } else { 2 };
                qd = &qd + &Poly::symbol(transverse_symbol(a, b).name()).scale(&BigRational::from_integer(c.into()));
            }
        }
        if qd.is_zero() {
            return Err(AsymptError::NormalFormFailure { prop: i, msg: "no transverse dependence".into() });
        }
        nf.quad.push(qd);
    }
    Ok(nf)
}

/// A quotient num/den of algebraic quantities. Small denominators are
/// divided out on construction; large ones are kept, since inverting a
/// multi-radical expression multiplies out all its conjugates.
#[derive(Clone, Debug, PartialEq)]
pub struct Quotient {
    pub num: Alg,
    pub den: Alg,
}

const EAGER_DIVISION_TERMS: usize = 12;

impl Quotient {
    pub fn new(num: Alg, den: Alg) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let size: usize = den.comps().iter().map(|c| c.num().num_terms() + c.den().num_terms()).sum();
        if size <= EAGER_DIVISION_TERMS {
            let v = &num * &den.inv()?;
            return Some(Quotient { num: v, den: Alg::one() });
        }
        Some(Quotient { num, den })
    }

    pub fn is_reduced(&self) -> bool {
        self.den == Alg::one()
    }

    /// The quotient as a single Alg value.
    pub fn value(&self) -> Alg {
        if self.is_reduced() {
            return self.num.clone();
        }
        &self.num * &self.den.inv().expect("nonzero denominator")
    }
}

impl fmt::Display for Quotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_reduced() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Determinants of the residue reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueDets {
    pub normal_form: NormalForm,
    /// eps * det[c_i | l_i]
    pub e: Alg,
    /// det[Q_i(q_perp) | l_i]
    pub q: Alg,
    /// det[l_i - l_base], the Jacobian of z_i = L_i(x)
    pub det_l: Alg,
    /// e / det_l and q / det_l
    pub e_normalized: Quotient,
    pub q_normalized: Quotient,
    /// det_l in orthonormal parallel coordinates
    pub det_l_orthonormal: Alg,
}

fn with_first_column(col: &[Alg], l: &[Vec<Alg>]) -> Vec<Vec<Alg>> {
    col.iter()
        .zip(l.iter())
        .map(|(c, row)| std::iter::once(c.clone()).chain(row.iter().cloned()).collect())
        .collect()
}

pub fn residue_dets(d: &Diagram, sol: &PinchSolution, branch: usize) -> Result<ResidueDets, AsymptError> {
    let nf = normal_form(d, sol, branch)?;
    let eps = Alg::from_poly(Poly::symbol(eps_symbol().name()));
    let e = &det_alg(&with_first_column(&nf.c, &nf.l_cov)) * &eps;
    let quad: Vec<Alg> = nf.quad.iter().cloned().map(Alg::from_poly).collect();
    let q = det_alg(&with_first_column(&quad, &nf.l_cov));
    let base = &nf.l_cov[0];
    let diff: Vec<Vec<Alg>> = nf.l_cov[1..]
        .iter()
        .map(|row| row.iter().zip(base.iter()).map(|(x, y)| x - y).collect())
        .collect();
    let det_l = det_alg(&diff);
    let singular =
        || AsymptError::SingularLinearPart(format!("the linear parts of {:?} are dependent at the pinch", sol.subset));
    let e_normalized = Quotient::new(e.clone(), det_l.clone()).ok_or_else(singular)?;
    let q_normalized = Quotient::new(q.clone(), det_l.clone()).ok_or_else(singular)?;
    let vol = frame_volume(d, sol)?;
    let vol_inv = vol.inv().ok_or_else(|| AsymptError::SingularLinearPart("degenerate parallel frame".into()))?;
    Ok(ResidueDets {
        e_normalized,
        q_normalized,
        det_l_orthonormal: &det_l * &vol_inv,
        normal_form: nf,
        e,
        q,
        det_l,
    })
}

/// A propagator outside the subset, at the pinch, as a function of the
/// loop momenta that remain to be integrated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectatorTerm {
    pub propagator: usize,
    /// Routing over the loops outside the pinch (diagram loop indices).
    pub loops: Vec<usize>,
    pub routing: Vec<i64>,
    /// Shift coefficients over the externals, after inserting the pinch point.
    pub shift: Vec<String>,
    pub mass_sq: String,
}

impl fmt::Display for SpectatorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}: routing {:?} over loops {:?}, shift [{}], mass_sq {}",
            self.propagator, self.routing, self.loops.iter().map(|a| a + 1).collect::<Vec<_>>(),
            self.shift.join(", "), self.mass_sq)
    }
}

/// Result of taking the residues in the parallel variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueReduction {
    pub prefactor_power: usize,
    /// 1 / det_l in orthonormal parallel coordinates
    pub jacobian: Quotient,
    /// E/det_l + Q/det_l
    pub denominator: Quotient,
    /// Spectators that depend only on the pinched loops, evaluated at the pinch.
    pub spectators_at_pinch: Vec<(usize, Alg)>,
    /// Spectators carrying loop momenta outside the pinch.
    pub residual: Vec<SpectatorTerm>,
    pub description: String,
}

fn spectators(d: &Diagram, sol: &PinchSolution, branch: usize) -> Result<(Vec<(usize, Alg)>, Vec<SpectatorTerm>), AsymptError> {
    let alpha = sol.alpha(branch);
    let mut fixed = Vec::new();
    let mut residual = Vec::new();
    let outside: Vec<usize> = (0..d.loops).filter(|a| !sol.involved_loops.contains(a)).collect();
    for j in (0..d.propagators.len()).filter(|j| !sol.subset.contains(j)) {
        let p = &d.propagators[j];
        let free: Vec<usize> = p.loops_touched().into_iter().filter(|a| outside.contains(a)).collect();
        if free.is_empty() {
            fixed.push((j, propagator_at(d, j, alpha)?));
        } else {
            // shift after inserting the pinch point for the pinched loops
            let mut masked = alpha.to_vec();
            for &a in &outside {
                masked[a] = vec![Alg::zero(); d.externals.len()];
            }
            let shift = propagator_momentum_at(d, j, &masked);
            residual.push(SpectatorTerm {
                propagator: j,
                loops: outside.clone(),
                routing: outside.iter().map(|&a| p.routing[a]).collect(),
                shift: shift.iter().map(|x| x.to_string()).collect(),
                mass_sq: p.mass_sq.to_string(),
            });
        }
    }
    Ok((fixed, residual))
}

pub fn residue_reduce(d: &Diagram, sol: &PinchSolution, branch: usize) -> Result<ResidueReduction, AsymptError> {
    let rd = residue_dets(d, sol, branch)?;
    let jacobian = Quotient::new(Alg::one(), rd.det_l_orthonormal.clone())
        .ok_or_else(|| AsymptError::SingularLinearPart("degenerate parallel frame".into()))?;
    let denominator = if rd.e_normalized.is_reduced() {
        Quotient { num: &rd.e_normalized.num + &rd.q_normalized.num, den: Alg::one() }
    } else {
        Quotient { num: &rd.e + &rd.q, den: rd.det_l.clone() }
    };
    let (fixed, residual) = spectators(d, sol, branch)?;
    let mut description = format!(
        "(2*pi*i)^{} * ({}) * 1/({})",
        sol.parallel_rank, jacobian, denominator
    );
    for (j, v) in &fixed {
        description.push_str(&format!(" * 1/D{}[{}]", j, v));
    }
    if !residual.is_empty() {
        let ids: Vec<String> = residual.iter().map(|s| format!("D{}", s.propagator)).collect();
        description.push_str(&format!(" * integral over remaining loops of 1/({})", ids.join("*")));
    }
    Ok(ResidueReduction {
        prefactor_power: sol.parallel_rank,
        jacobian,
        denominator,
        spectators_at_pinch: fixed,
        residual,
        description,
    })
}

/// Exact split M_I = 2^k vol t + psi of a one-loop k-pinch.
#[derive(Clone, Debug, PartialEq)]
pub struct MIDecomposition {
    /// sqrt of the Gram determinant of the shift differences
    pub volume_factor: Alg,
    pub psi: Alg,
    /// M_I - 2^k vol t - psi, zero when the identity holds
    pub remainder: Alg,
    pub m_i: Alg,
    /// psi / Landau polynomial when every component numerator divides
    pub landau_quotient: Option<Alg>,
    pub degenerate: bool,
}

pub fn mi_decompose(d: &Diagram, sol: &PinchSolution) -> Result<MIDecomposition, AsymptError> {
    if sol.involved_loops.len() != 1 || sol.subset.iter().any(|&i| d.propagators[i].loops_touched().len() != 1) {
        return Err(AsymptError::NotOneLoopSubset(format!("subset {:?}", sol.subset)));
    }
    let a = sol.involved_loops[0];
    if sol.classification == crate::pinch::Classification::AtInfinity {
        return Ok(MIDecomposition {
            volume_factor: Alg::zero(),
            psi: Alg::zero(),
            remainder: Alg::zero(),
            m_i: Alg::zero(),
            landau_quotient: None,
            degenerate: true,
        });
    }
    let nf = normal_form(d, sol, 0)?;
    let vol = frame_volume(d, sol)?;
    let vol_inv = vol.inv().ok_or_else(|| AsymptError::SingularLinearPart("degenerate parallel frame".into()))?;
    let t = Alg::from_poly(Poly::symbol(transverse_symbol(a, a).name()));
    // B_i = t + P_i(Q); orthonormal gradient columns
    let b: Vec<Alg> = nf.c.iter().map(|c| &t + c).collect();
    let m_i = &det_alg(&with_first_column(&b, &nf.l_cov)) * &vol_inv;
    let psi = &det_alg(&with_first_column(&nf.c, &nf.l_cov)) * &vol_inv;
    let k = sol.subset.len() - 1;
    let two_k = Alg::from_int(1i64 << k);
    let remainder = &(&m_i - &(&(&two_k * &vol) * &t)) - &psi;
    let landau = landau_from_pinch(sol)?;
    let lp = landau.as_poly().expect("one-loop Landau polynomial is rational");
    let divisible = psi.comps().iter().all(|c| c.num().div_exact(&lp).is_some());
    let landau_quotient = if divisible { crate::landau::quotient(&psi, &landau.poly) } else { None };
    Ok(MIDecomposition { volume_factor: vol, psi, remainder, m_i, landau_quotient, degenerate: false })
}

/// Leading coefficient: closed form or an integral over the loops outside
/// the pinch.
#[derive(Clone, Debug, PartialEq)]
pub enum Leading {
    Closed {
        /// product of 1/D_j at the pinch over spectators
        spectator_product: Alg,
        /// 1/det_l (orthonormal)
        jacobian: Quotient,
        /// V_{n-1}(1) as an expression in d (numeric when d is fixed)
        sphere_volume: String,
        sphere_volume_value: Option<f64>,
        /// det of the transverse quadratic form of Q (before dividing by det_l)
        quad_det: Alg,
        det_l: Alg,
        expression: String,
    },
    ResidualIntegrand {
        jacobian: Quotient,
        spectators: Vec<SpectatorTerm>,
        spectators_at_pinch: Vec<(usize, Alg)>,
    },
}

/// V_{n-1}(1) = 2 pi^{n/2} / Gamma(n/2), the area of the unit (n-1)-sphere.
pub fn sphere_volume(n: i64) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticExpansion {
    pub subset: Vec<usize>,
    pub involved_loops: Vec<usize>,
    pub branch: Option<Vec<i8>>,
    pub exponent: Exponent,
    pub residue_count: usize,
    pub prefactor_power: usize,
    /// M_ab with Q(q_perp) = sum M_aa t_a + 2 sum_{a<b} M_ab t_ab
    pub quad_form: Vec<Vec<Alg>>,
    pub epsilon_term: Quotient,
    pub leading: Leading,
    pub landau: LandauPolynomial,
    pub logarithmic_candidate: bool,
    pub warnings: Vec<String>,
}

fn coeff_of(x: &Alg, sym: &str) -> Alg {
    let s = crate::exactalg::Symbol::new(sym);
    let comps: Vec<RatFunc> = x
        .comps()
        .iter()
        .map(|c| {
            let num = c.num().coeffs_in(&s);
            let lin = num.get(1).cloned().unwrap_or_else(Poly::zero);
            RatFunc::new(lin, c.den().clone()).expect("nonzero denominator")
        })
        .collect();
    Alg::from_parts(x.radicands(), &comps)
}

pub fn leading_coefficient(d: &Diagram, sol: &PinchSolution, dim: Dimension) -> Result<AsymptoticExpansion, AsymptError> {
    leading_coefficient_branch(d, sol, dim, 0)
}

pub fn leading_coefficient_branch(
    d: &Diagram,
    sol: &PinchSolution,
    dim: Dimension,
    branch: usize,
) -> Result<AsymptoticExpansion, AsymptError> {
    require_finite(sol)?;
    let rd = residue_dets(d, sol, branch)?;
    let red = residue_reduce(d, sol, branch)?;
    let landau = landau_from_pinch(sol)?;
    let loops = sol.involved_loops.len();
    let r = sol.parallel_rank;
    let exponent = Exponent::new(loops, r, dim);
    // raw coefficients of Q; dividing by det_l entrywise is left to the
    // reader since products of the normalized entries are expensive
    let mut quad_form = vec![vec![Alg::zero(); loops]; loops];
    for (x, &a) in sol.involved_loops.iter().enumerate() {
        for (y, &b) in sol.involved_loops.iter().enumerate() {
            let c = coeff_of(&rd.q, transverse_symbol(a, b).name());
            quad_form[x][y] = if a == b { c } else { &c * &Alg::from_rational(BigRational::new(1.into(), 2.into())) };
        }
    }
    let quad_det = det_alg(&quad_form);
    let mut warnings = Vec::new();
    let n_i = sol.subset.len();
    let compact = match dim {
        Dimension::Int(dv) => BigRational::new(((dv - 1) * n_i as i64 - 2).into(), 2.into()).to_string(),
        Dimension::Symbolic => format!("-1+(d-1)*{}/2", n_i),
    };
    let compact_differs = match dim {
        Dimension::Int(dv) => BigRational::new(((dv - 1) * n_i as i64 - 2).into(), 2.into()) != exponent.at(dv),
        Dimension::Symbolic => !(n_i == loops && n_i == r),
    };
    if compact_differs {
        warnings.push(format!(
            "the compact exponent -1+(d-1)|I|/2 gives {} for |I| = {}; the transverse-dimension rule \
             (d*{} - {})/2 - 1 = {} is used",
            compact, n_i, loops, r, exponent
        ));
    }
    if n_i != r {
        warnings.push(format!(
            "prefactor (2*pi*i)^|I| would be (2*pi*i)^{}; the residue count gives (2*pi*i)^{}",
            n_i, r
        ));
    }
    let logarithmic_candidate = exponent.is_logarithmic();
    if logarithmic_candidate {
        warnings.push("exponent 0: logarithmic candidate, power-law fits do not apply".into());
    }
    if sol.branches.len() > 1 {
        warnings.push(format!("{} sign branches; branch {} shown", sol.branches.len(), branch));
    }
    let leading = if red.residual.is_empty() {
        let mut prod = Alg::one();
        for (j, v) in &red.spectators_at_pinch {
            prod = &prod
                * &v.inv().ok_or_else(|| AsymptError::NormalFormFailure {
                    prop: *j,
                    msg: "spectator propagator vanishes at the pinch".into(),
                })?;
        }
        let (sphere_volume_str, value) = match dim {
            Dimension::Int(dv) => {
                let n = exponent.transverse_dim(dv);
                let v = if n > 0 { Some(sphere_volume(n)) } else { None };
                (v.map(|x| format!("{}", x)).unwrap_or_else(|| "undefined".into()), v)
            }
            Dimension::Symbolic => {
                let n = if loops == 1 { format!("(d-{})", r) } else { format!("({}*d-{})", loops, r) };
                (format!("2*pi^({}/2)/Gamma({}/2)", n, n), None)
            }
        };
        let per_block = if loops == 1 { String::new() } else { " per transverse block".to_string() };
        let expression = format!(
            "(2*pi*i)^{} * ({}) * ({}) * {} / sqrt(({})/({})^{}){}",
            r, prod, red.jacobian, sphere_volume_str, quad_det, rd.det_l, loops, per_block
        );
        Leading::Closed {
            spectator_product: prod,
            jacobian: red.jacobian.clone(),
            sphere_volume: sphere_volume_str,
            sphere_volume_value: value,
            quad_det,
            det_l: rd.det_l.clone(),
            expression,
        }
    } else {
        Leading::ResidualIntegrand {
            jacobian: red.jacobian.clone(),
            spectators: red.residual.clone(),
            spectators_at_pinch: red.spectators_at_pinch.clone(),
        }
    };
    Ok(AsymptoticExpansion {
        subset: sol.subset.clone(),
        involved_loops: sol.involved_loops.clone(),
        branch: if sol.branch_loops.is_empty() { None } else { Some(sol.branches[branch].signs.clone()) },
        exponent,
        residue_count: r,
        prefactor_power: r,
        quad_form,
        epsilon_term: rd.e_normalized,
        leading,
        landau,
        logarithmic_candidate,
        warnings,
    })
}

impl Serialize for AsymptoticExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("AsymptoticExpansion", 12)?;
        st.serialize_field("subset", &self.subset)?;
        st.serialize_field("involved_loops", &self.involved_loops)?;
        st.serialize_field("branch", &self.branch)?;
        st.serialize_field("exponent", &self.exponent.to_string())?;
        st.serialize_field("exponent_symbolic", &self.exponent.symbolic())?;
        st.serialize_field("prefactor_power", &self.prefactor_power)?;
        st.serialize_field("residue_count", &self.residue_count)?;
        let qf: Vec<Vec<String>> = self.quad_form.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        st.serialize_field("quad_form", &qf)?;
        st.serialize_field("epsilon_term", &self.epsilon_term.to_string())?;
        match &self.leading {
            Leading::Closed { expression, .. } => {
                st.serialize_field("leading", &serde_json::json!({ "closed": expression }))?
            }
            Leading::ResidualIntegrand { jacobian, spectators, spectators_at_pinch } => {
                let fixed: Vec<serde_json::Value> = spectators_at_pinch
                    .iter()
                    .map(|(j, v)| serde_json::json!({ "propagator": j, "value": v.to_string() }))
                    .collect();
                st.serialize_field(
                    "leading",
                    &serde_json::json!({ "residual_integrand": spectators, "jacobian": jacobian.to_string(), "at_pinch": fixed }),
                )?
            }
        }
        st.serialize_field("landau_ref", &self.landau)?;
        st.serialize_field("logarithmic_candidate", &self.logarithmic_candidate)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

/// Orthonormal version of a frame via Gram-Schmidt, as Alg combinations of
/// externals (the parallel directions actually used by the normalized
/// determinants).
pub fn orthonormal_frame(d: &Diagram, frame: &[Vec<BigRational>]) -> Result<Vec<Vec<Alg>>, AsymptError> {
    let mut out: Vec<Vec<Alg>> = Vec::new();
    for f in frame {
        let mut v: Vec<Alg> = f.iter().map(|c| Alg::from_rational(c.clone())).collect();
        for u in &out {
            let c = d.ext_dot(&v, u)?;
            v = v.iter().zip(u.iter()).map(|(x, y)| x - &(&c * y)).collect();
        }
        let n2 = d.ext_dot(&v, &v)?;
        let n = n2
            .sqrt()
            .and_then(|x| x.inv())
            .ok_or_else(|| AsymptError::SingularLinearPart("frame vector of zero or unsupported norm".into()))?;
        out.push(v.iter().map(|x| x * &n).collect());
    }
    Ok(out)
}
