//! Pinch points of propagator subsets.
//!
//! For a subset I the loop momenta q_a of the involved loops are written in
//! a parallel frame (combinations of external momenta) and the degeneracy
//! system "all D_i equal" is solved. Single-loop components use the affine
//! hull of the normalized shifts as frame; loops linked by propagators that
//! carry several loop momenta share the span of the externals in their shifts
//! and are solved per loop first, with the linking propagators left as
//! conditions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError};
use crate::exactalg::{det, solve_linear, Alg, ExactError, RatFunc, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PinchError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("unsupported pinch: {0}")]
    UnsupportedPinch(String),
    #[error("pole at the kinematic point: {0}")]
    PoleAtPoint(String),
    #[error("missing kinematic value for '{0}'")]
    MissingValue(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Finite,
    AtInfinity,
    NonIsolated,
    NonIsolatedCandidate,
}

/// One choice of square-root signs for loops whose position is fixed by a
/// quadratic equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// +1 or -1 per entry of `PinchSolution::branch_loops`.
    pub signs: Vec<i8>,
    /// Coefficients of Q_a over all externals, for every diagram loop
    /// (zero rows for loops outside the subset).
    pub alpha: Vec<Vec<Alg>>,
    /// Residual condition values, aligned with `condition_props`.
    pub conditions: Vec<Alg>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PinchSolution {
    pub subset: Vec<usize>,
    pub involved_loops: Vec<usize>,
    pub classification: Classification,
    pub parallel_rank: usize,
    /// Parallel frame per diagram loop: each vector is a rational combination
    /// of the externals. Empty for uninvolved loops.
    pub frames: Vec<Vec<Vec<BigRational>>>,
    pub branch_loops: Vec<usize>,
    pub branches: Vec<Branch>,
    /// Propagator carrying each residual condition.
    pub condition_props: Vec<usize>,
    pub free_params: usize,
    pub notes: Vec<String>,
}

impl PinchSolution {
    pub fn is_finite(&self) -> bool {
        self.classification == Classification::Finite
    }

    /// The pinch point of a branch as loop-momentum coefficient vectors.
    pub fn alpha(&self, branch: usize) -> &[Vec<Alg>] {
        &self.branches[branch].alpha
    }

    pub fn condition(&self, branch: usize) -> Option<&Alg> {
        self.branches.get(branch).and_then(|b| b.conditions.first())
    }
}

fn strings(row: &[Alg]) -> Vec<String> {
    row.iter().map(|x| x.to_string()).collect()
}

impl Serialize for PinchSolution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let branches: Vec<serde_json::Value> = self
            .branches
            .iter()
            .map(|b| {
                let alpha: Vec<Vec<String>> = b.alpha.iter().map(|r| strings(r)).collect();
                serde_json::json!({ "signs": b.signs, "alpha": alpha, "conditions": strings(&b.conditions) })
            })
            .collect();
        let frames: Vec<Vec<Vec<String>>> = self
            .frames
            .iter()
            .map(|f| f.iter().map(|v| v.iter().map(|c| c.to_string()).collect()).collect())
            .collect();
        let mut st = s.serialize_struct("PinchSolution", 10)?;
        st.serialize_field("subset", &self.subset)?;
        st.serialize_field("classification", &self.classification)?;
        st.serialize_field("parallel_rank", &self.parallel_rank)?;
        st.serialize_field("involved_loops", &self.involved_loops)?;
        // branch 0 for quick access; every branch is listed below
        let alpha: Vec<Vec<String>> = self.branches.first().map(|b| b.alpha.iter().map(|r| strings(r)).collect()).unwrap_or_default();
        st.serialize_field("alpha", &alpha)?;
        st.serialize_field("frames", &frames)?;
        st.serialize_field("branch_loops", &self.branch_loops)?;
        st.serialize_field("branches", &branches)?;
        st.serialize_field("condition_props", &self.condition_props)?;
        st.serialize_field("free_params", &self.free_params)?;
        st.serialize_field("notes", &self.notes)?;
        st.end()
    }
}

fn canonical_key(d: &Diagram, i: usize) -> (Vec<i64>, Vec<BigRational>, String) {
    let p = &d.propagators[i];
    let first = p.routing.iter().find(|c| **c != 0).copied().unwrap_or(1);
    if first < 0 {
        (
            p.routing.iter().map(|c| -c).collect(),
            p.shift.iter().map(|c| -c.clone()).collect(),
            p.mass_key.clone(),
        )
    } else {
        (p.routing.clone(), p.shift.clone(), p.mass_key.clone())
    }
}

/// All subsets of size 2..=max_size in lexicographic order by size, skipping
/// subsets that contain the same propagator twice.
pub fn enumerate_subsets(d: &Diagram, max_size: usize) -> Result<Vec<Vec<usize>>, PinchError> {
    let n = d.propagators.len();
    if max_size < 2 || max_size > n {
        return Err(PinchError::InvalidSubset(format!("max_size must be in 2..={}, got {}", n, max_size)));
    }
    let keys: Vec<_> = (0..n).map(|i| canonical_key(d, i)).collect();
    let mut out = Vec::new();
    for size in 2..=max_size {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let dup = idx.iter().enumerate().any(|(x, &i)| idx[x + 1..].iter().any(|&j| keys[i] == keys[j]));
            if !dup {
                out.push(idx.clone());
            }
            // next combination
            let mut k = size;
            while k > 0 && idx[k - 1] == n - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(out)
}

fn rvec_alg(v: &[BigRational]) -> Vec<Alg> {
    v.iter().map(|c| Alg::from_rational(c.clone())).collect()
}

fn add_vec(a: &[Alg], b: &[Alg]) -> Vec<Alg> {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

fn scale_vec(a: &[Alg], c: &Alg) -> Vec<Alg> {
    a.iter().map(|x| x * c).collect()
}

/// Momentum of propagator `i` at loop coefficients `alpha`, over externals.
pub fn propagator_momentum_at(d: &Diagram, i: usize, alpha: &[Vec<Alg>]) -> Vec<Alg> {
    let p = &d.propagators[i];
    let mut k = rvec_alg(&p.shift);
    for (a, c) in p.routing.iter().enumerate() {
        if *c != 0 {
            k = add_vec(&k, &scale_vec(&alpha[a], &Alg::from_int(*c)));
        }
    }
    k
}

/// D_i evaluated at the parallel point `alpha` (no transverse part).
pub fn propagator_at(d: &Diagram, i: usize, alpha: &[Vec<Alg>]) -> Result<Alg, PinchError> {
    let k = propagator_momentum_at(d, i, alpha);
    let sq = d.ext_dot(&k, &k)?;
    Ok(&sq + &Alg::from_ratfunc(d.propagators[i].mass_sq.clone()))
}

struct Normalized {
    coeff: i64,
    u: Vec<BigRational>,
    mu: RatFunc,
}

/// D_i / c^2 = (q_a + u)^2 + mu for a propagator on the single loop a.
fn normalized(d: &Diagram, i: usize, a: usize) -> Normalized {
    let p = &d.propagators[i];
    let c = p.routing[a];
    let cr = BigRational::from_integer(c.into());
    let u = p.shift.iter().map(|x| x / &cr).collect();
    let mu = p.mass_sq.scale(&(&cr * &cr).recip());
    Normalized { coeff: c, u, mu }
}

#[derive(Default)]
struct Component {
    frames: BTreeMap<usize, Vec<Vec<BigRational>>>,
    at_infinity: bool,
    inconsistent: bool,
    free: usize,
    branch_loops: Vec<usize>,
    /// (signs, alpha rows for this component's loops, condition values)
    branches: Vec<(Vec<i8>, BTreeMap<usize, Vec<Alg>>, Vec<Alg>)>,
    condition_props: Vec<usize>,
    notes: Vec<String>,
}

fn solve_single_loop(d: &Diagram, a: usize, props: &[usize]) -> Result<Component, PinchError> {
    let n_ext = d.externals.len();
    let norms: Vec<Normalized> = props.iter().map(|&i| normalized(d, i, a)).collect();
    let u0 = &norms[0].u;
    let w: Vec<Vec<BigRational>> = norms[1..]
        .iter()
        .map(|x| x.u.iter().zip(u0.iter()).map(|(p, q)| p - q).collect())
        .collect();
    let k = w.len();
    let mut comp = Component::default();
    comp.frames.insert(a, w.clone());
    let wa: Vec<Vec<Alg>> = w.iter().map(|v| rvec_alg(v)).collect();
    let mut g = vec![vec![RatFunc::zero(); k]; k];
    for j in 0..k {
        for l in j..k {
            let v = d.ext_dot(&wa[j], &wa[l])?.as_ratfunc().expect("rational Gram entries");
            g[j][l] = v.clone();
            g[l][j] = v;
        }
    }
    if k > 0 && det(&g).is_zero() {
        comp.at_infinity = true;
        comp.notes.push(format!(
            "the Gram matrix of the shift differences of propagators {:?} is singular: the pinch sits at infinity",
            props
        ));
        return Ok(comp);
    }
    let b: Vec<RatFunc> = (0..k)
        .map(|j| {
            let wj2 = &g[j][j];
            let s = &(wj2 + &norms[j + 1].mu) - &norms[0].mu;
            s.scale(&BigRational::new((-1).into(), 2.into()))
        })
        .collect();
    let sol = solve_linear(&g, &b)?;
    let mut alpha: Vec<Alg> = rvec_alg(u0).iter().map(|x| -x).collect();
    for (j, aj) in sol.solution.iter().enumerate() {
        alpha = add_vec(&alpha, &scale_vec(&wa[j], &Alg::from_ratfunc(aj.clone())));
    }
    debug_assert_eq!(alpha.len(), n_ext);
    // condition: normalized D at the pinch
    let y = add_vec(&alpha, &rvec_alg(u0));
    let cond = &d.ext_dot(&y, &y)? + &Alg::from_ratfunc(norms[0].mu.clone());
    let cond = cond.scale_ratfunc(&RatFunc::from_int(norms[0].coeff * norms[0].coeff));
    let mut rows = BTreeMap::new();
    rows.insert(a, alpha);
    comp.branches.push((Vec::new(), rows, vec![cond]));
    comp.condition_props.push(props[0]);
    Ok(comp)
}

enum LoopState {
    Fixed(Vec<Alg>),
    /// x0 + (center +- offset) * dir
    Quadratic { x0: Vec<Alg>, dir: Vec<Alg>, center: Alg, offset: Alg },
    Free,
}

fn solve_multi_loop(d: &Diagram, loops: &[usize], props: &[usize]) -> Result<Component, PinchError> {
    let n_ext = d.externals.len();
    let mut comp = Component::default();
    let mut frame_ext: BTreeSet<usize> = BTreeSet::new();
    for &i in props {
        frame_ext.extend(d.propagators[i].shift_support());
    }
    let e: Vec<usize> = frame_ext.into_iter().collect();
    let frame: Vec<Vec<BigRational>> = e
        .iter()
        .map(|&x| {
            let mut v = vec![BigRational::zero(); n_ext];
            v[x] = BigRational::one();
            v
        })
        .collect();
    for &a in loops {
        comp.frames.insert(a, frame.clone());
    }
    let ge = d.gram_matrix(&e)?;
    if !e.is_empty() && det(&ge).is_zero() {
        comp.at_infinity = true;
        comp.notes.push(format!("the Gram matrix of externals {:?} is singular: the pinch sits at infinity", e));
        return Ok(comp);
    }
    let embed = |x: &[Alg]| -> Vec<Alg> {
        let mut v = vec![Alg::zero(); n_ext];
        for (j, &ext) in e.iter().enumerate() {
            v[ext] = x[j].clone();
        }
        v
    };
    let mut states: BTreeMap<usize, LoopState> = BTreeMap::new();
    let mut base_conditions: Vec<(usize, usize)> = Vec::new(); // (loop, prop)
    let mut degenerate_conditions: Vec<(usize, usize, Alg)> = Vec::new();
    for &a in loops {
        let cluster: Vec<usize> = props
            .iter()
            .copied()
            .filter(|&i| d.propagators[i].loops_touched() == vec![a])
            .collect();
        if cluster.is_empty() {
            if e.is_empty() {
                // no parallel directions at all: the loop sits at Q = 0
                states.insert(a, LoopState::Fixed(vec![Alg::zero(); n_ext]));
            } else {
                comp.free += e.len();
                states.insert(a, LoopState::Free);
            }
            continue;
        }
        let norms: Vec<Normalized> = cluster.iter().map(|&i| normalized(d, i, a)).collect();
        let u0 = rvec_alg(&norms[0].u);
        let u0sq = d.ext_dot(&u0, &u0)?;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for nj in &norms[1..] {
            let uj = rvec_alg(&nj.u);
            let wj: Vec<Alg> = add_vec(&uj, &scale_vec(&u0, &Alg::from_int(-1)));
            let row: Vec<RatFunc> = e
                .iter()
                .map(|&x| {
                    let mut px = vec![Alg::zero(); n_ext];
                    px[x] = Alg::one();
                    d.ext_dot(&px, &wj).map(|v| v.as_ratfunc().unwrap().scale(&BigRational::from_integer(2.into())))
                })
                .collect::<Result<_, _>>()?;
            let ujsq = d.ext_dot(&uj, &uj)?;
            let r = &(&(&ujsq - &u0sq) + &Alg::from_ratfunc(nj.mu.clone())) - &Alg::from_ratfunc(norms[0].mu.clone());
            rows.push(row);
            rhs.push(-r.as_ratfunc().unwrap());
        }
        let (x0, null): (Vec<RatFunc>, Vec<Vec<RatFunc>>) = if rows.is_empty() {
            let basis = (0..e.len())
                .map(|j| (0..e.len()).map(|l| if j == l { RatFunc::one() } else { RatFunc::zero() }).collect())
                .collect();
            (vec![RatFunc::zero(); e.len()], basis)
        } else {
            match solve_linear(&rows, &rhs) {
                Ok(s) => (s.solution, s.nullspace),
                Err(ExactError::InconsistentSystem) => {
                    comp.inconsistent = true;
                    comp.notes.push(format!("the difference equations on loop {} are inconsistent", a + 1));
                    return Ok(comp);
                }
                Err(err) => return Err(err.into()),
            }
        };
        let x0a: Vec<Alg> = x0.into_iter().map(Alg::from_ratfunc).collect();
        match null.len() {
            0 => {
                states.insert(a, LoopState::Fixed(embed(&x0a)));
                base_conditions.push((a, cluster[0]));
            }
            1 => {
                let dir: Vec<Alg> = null[0].iter().cloned().map(Alg::from_ratfunc).collect();
                let f = |tau: i64| -> Result<Alg, PinchError> {
                    let x = add_vec(&x0a, &scale_vec(&dir, &Alg::from_int(tau)));
                    let y = add_vec(&embed(&x), &u0);
                    Ok(&d.ext_dot(&y, &y)? + &Alg::from_ratfunc(norms[0].mu.clone()))
                };
                let (f0, f1, fm) = (f(0)?, f(1)?, f(-1)?);
                let half = Alg::from_rational(BigRational::new(1.into(), 2.into()));
                let qa = &(&(&f1 + &fm) * &half) - &f0;
                let qb = &(&f1 - &fm) * &half;
                if !qa.is_zero() {
                    let two_a = &qa * &Alg::from_int(2);
                    let disc = &(&qb * &qb) - &(&(&qa * &f0) * &Alg::from_int(4));
                    let root = disc
                        .sqrt()
                        .ok_or_else(|| PinchError::UnsupportedPinch("nested square roots in the per-loop quadric".into()))?;
                    let inv = two_a.inv().unwrap();
                    let center = &(-&qb) * &inv;
                    let offset = &root * &inv;
                    if offset.is_zero() {
                        states.insert(a, LoopState::Fixed(embed(&add_vec(&x0a, &scale_vec(&dir, &center)))));
                    } else {
                        states.insert(a, LoopState::Quadratic { x0: embed(&x0a), dir: embed(&dir), center, offset });
                    }
                } else if !qb.is_zero() {
                    let tau = &(-&f0) / &qb;
                    states.insert(a, LoopState::Fixed(embed(&add_vec(&x0a, &scale_vec(&dir, &tau)))));
                } else {
                    comp.free += 1;
                    degenerate_conditions.push((a, cluster[0], f0));
                    states.insert(a, LoopState::Free);
                }
            }
            k => {
                comp.free += k;
                states.insert(a, LoopState::Free);
            }
        }
    }
    let couplings: Vec<usize> = props
        .iter()
        .copied()
        .filter(|&i| d.propagators[i].loops_touched().len() > 1)
        .collect();
    if comp.free > 0 {
        let free_loops: Vec<usize> = states
            .iter()
            .filter(|(_, s)| matches!(s, LoopState::Free))
            .map(|(a, _)| *a)
            .collect();
        for &a in &free_loops {
            let n = couplings.iter().filter(|&&i| d.propagators[i].routing[a] != 0).count();
            if n >= 2 {
                return Err(PinchError::UnsupportedPinch(format!(
                    "loop {} stays undetermined after the per-loop stage and enters {} linking propagators {:?}; \
                     the remaining system is bilinear",
                    a + 1,
                    n,
                    couplings
                )));
            }
        }
        comp.condition_props = base_conditions.iter().map(|x| x.1).collect();
        comp.condition_props.extend(couplings.iter().copied());
        comp.condition_props.extend(degenerate_conditions.iter().map(|x| x.1));
        comp.notes.push(format!("{} free parallel parameters remain", comp.free));
        return Ok(comp);
    }
    comp.branch_loops = states
        .iter()
        .filter(|(_, s)| matches!(s, LoopState::Quadratic { .. }))
        .map(|(a, _)| *a)
        .collect();
    let nb = comp.branch_loops.len();
    comp.condition_props = base_conditions.iter().map(|x| x.1).collect();
    comp.condition_props.extend(couplings.iter().copied());
    for mask in 0..(1usize << nb) {
        let signs: Vec<i8> = (0..nb).map(|j| if mask >> j & 1 == 0 { 1 } else { -1 }).collect();
        let mut full: Vec<Vec<Alg>> = vec![vec![Alg::zero(); n_ext]; d.loops];
        let mut rows = BTreeMap::new();
        for (a, st) in &states {
            let v = match st {
                LoopState::Fixed(x) => x.clone(),
                LoopState::Quadratic { x0, dir, center, offset } => {
                    let j = comp.branch_loops.iter().position(|b| b == a).unwrap();
                    let tau = if signs[j] > 0 { center + offset } else { center - offset };
                    add_vec(x0, &scale_vec(dir, &tau))
                }
                LoopState::Free => unreachable!(),
            };
            full[*a] = v.clone();
            rows.insert(*a, v);
        }
        let mut conds = Vec::new();
        for &i in &comp.condition_props {
            conds.push(propagator_at(d, i, &full)?);
        }
        comp.branches.push((signs, rows, conds));
    }
    Ok(comp)
}

/// Solve the degeneracy system for subset `subset`.
pub fn solve_pinch(d: &Diagram, subset: &[usize]) -> Result<PinchSolution, PinchError> {
    let mut subset: Vec<usize> = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    if subset.is_empty() {
        return Err(PinchError::InvalidSubset("empty subset".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= d.propagators.len()) {
        return Err(PinchError::InvalidSubset(format!("propagator index {} out of range", bad)));
    }
    // components of loops linked by multi-loop propagators
    let mut parent: Vec<usize> = (0..d.loops).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut involved = BTreeSet::new();
    for &i in &subset {
        let t = d.propagators[i].loops_touched();
        involved.extend(t.iter().copied());
        for w in t.windows(2) {
            let (ra, rb) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[ra] = rb;
        }
    }
    let involved: Vec<usize> = involved.into_iter().collect();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &a in &involved {
        let r = find(&mut parent, a);
        groups.entry(r).or_default().push(a);
    }
    let mut comps = Vec::new();
    for loops in groups.values() {
        let props: Vec<usize> = subset
            .iter()
            .copied()
            .filter(|&i| d.propagators[i].loops_touched().iter().any(|a| loops.contains(a)))
            .collect();
        let c = if loops.len() == 1 && props.iter().all(|&i| d.propagators[i].loops_touched().len() == 1) {
            solve_single_loop(d, loops[0], &props)?
        } else {
            solve_multi_loop(d, loops, &props)?
        };
        comps.push(c);
    }
    let mut frames = vec![Vec::new(); d.loops];
    let mut notes = Vec::new();
    for c in &comps {
        for (a, f) in &c.frames {
            frames[*a] = f.clone();
        }
        notes.extend(c.notes.iter().cloned());
    }
    let parallel_rank = frames.iter().map(|f| f.len()).sum();
    let free: usize = comps.iter().map(|c| c.free).sum();
    let mut sol = PinchSolution {
        subset: subset.clone(),
        involved_loops: involved.clone(),
        classification: Classification::Finite,
        parallel_rank,
        frames,
        branch_loops: Vec::new(),
        branches: Vec::new(),
        condition_props: Vec::new(),
        free_params: free,
        notes,
    };
    for c in &comps {
        sol.condition_props.extend(c.condition_props.iter().copied());
    }
    if comps.iter().any(|c| c.at_infinity) {
        sol.classification = Classification::AtInfinity;
        return Ok(sol);
    }
    if comps.iter().any(|c| c.inconsistent) {
        sol.classification = Classification::NonIsolatedCandidate;
        return Ok(sol);
    }
    if free > 0 {
        sol.classification = Classification::NonIsolated;
        return Ok(sol);
    }
    // product of the component branch sets
    let mut branches = vec![Branch {
        signs: Vec::new(),
        alpha: vec![vec![Alg::zero(); d.externals.len()]; d.loops],
        conditions: Vec::new(),
    }];
    for c in &comps {
        sol.branch_loops.extend(c.branch_loops.iter().copied());
        let mut next = Vec::new();
        for b in &branches {
            for (signs, rows, conds) in &c.branches {
                let mut nb = b.clone();
                nb.signs.extend(signs.iter().copied());
                for (a, r) in rows {
                    nb.alpha[*a] = r.clone();
                }
                nb.conditions.extend(conds.iter().cloned());
                next.push(nb);
            }
        }
        branches = next;
    }
    sol.branches = branches;
    sol.classification = match sol.condition_props.len() {
        1 => Classification::Finite,
        0 => Classification::NonIsolated,
        _ => Classification::NonIsolatedCandidate,
    };
    if sol.classification == Classification::NonIsolatedCandidate {
        sol.notes.push(format!(
            "{} independent residual conditions: a deeper stratum, no single Landau polynomial",
            sol.condition_props.len()
        ));
    }
    Ok(sol)
}

/// Numeric pinch coordinates of one branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericBranch {
    pub signs: Vec<i8>,
    /// Per loop, per external.
    pub alpha: Vec<Vec<Complex64>>,
    pub conditions: Vec<Complex64>,
}

pub fn eval_alg(x: &Alg, kin: &HashMap<Symbol, Complex64>) -> Result<Complex64, PinchError> {
    for v in x.radicands().iter().flat_map(|r| r.vars()).chain(x.comps().iter().flat_map(|c| c.vars())) {
        if !kin.contains_key(&v) {
            return Err(PinchError::MissingValue(v.name().to_string()));
        }
    }
    x.eval_complex(kin).ok_or_else(|| PinchError::PoleAtPoint(format!("a denominator of {} vanishes", x)))
}

/// Evaluate every branch of a pinch solution at numeric kinematics.
pub fn eval_pinch(sol: &PinchSolution, kin: &HashMap<Symbol, Complex64>) -> Result<Vec<NumericBranch>, PinchError> {
    sol.branches
        .iter()
        .map(|b| {
            let alpha = b
                .alpha
                .iter()
                .map(|row| row.iter().map(|x| eval_alg(x, kin)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let conditions = b.conditions.iter().map(|x| eval_alg(x, kin)).collect::<Result<Vec<_>, _>>()?;
            Ok(NumericBranch { signs: b.signs.clone(), alpha, conditions })
        })
        .collect()
}

pub fn real_kinematics(vals: &[(&str, f64)]) -> HashMap<Symbol, Complex64> {
    vals.iter().map(|(k, v)| (Symbol::new(k), Complex64::new(*v, 0.0))).collect()
}
