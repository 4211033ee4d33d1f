//! Joint spin states after the gate, remnant light–spin entanglement, and
//! logarithmic negativity.
//!
//! Basis order is fixed: sector `(s1, s2)` sits at index `i1·(N₂+1) + i2`
//! with `s = 2i − N`, i.e. s1-major, s2-minor, both ascending.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::linalg::{eigh, singular_values, CMatrix, EigenMethod};
use crate::model::{sectors, SpinSector, SpinState};
use crate::phase::PhaseTable;
use crate::trajectory::Trajectory;

/// Spin-dependent coherent amplitude `δα e^{−i(s1+s2)δθ}` left in the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemnantModel {
    #[serde(serialize_with = "serialize_complex")]
    pub delta_alpha: Complex64,
    pub delta_theta: f64,
}

impl RemnantModel {
    pub fn new(delta_alpha: Complex64, delta_theta: f64) -> Result<Self> {
        if !(delta_alpha.re.is_finite() && delta_alpha.im.is_finite()) {
            return Err(invalid("delta_alpha", "must be finite"));
        }
        if !delta_theta.is_finite() {
            return Err(invalid("delta_theta", "must be finite"));
        }
        Ok(Self { delta_alpha, delta_theta })
    }

    /// Perfect disentangling.
    pub fn ideal() -> Self {
        Self { delta_alpha: Complex64::default(), delta_theta: 0.0 }
    }

    /// Offset left behind in a sector with total spin `total`.
    pub fn offset(&self, total: i32) -> Complex64 {
        self.delta_alpha * Complex64::cis(-(total as f64) * self.delta_theta)
    }
}

fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// `⟨β|γ⟩ = exp(−|β|²/2 − |γ|²/2 + β*γ)`.
pub fn coherent_overlap(beta: Complex64, gamma: Complex64) -> Complex64 {
    (beta.conj() * gamma - 0.5 * (beta.norm_sqr() + gamma.norm_sqr())).exp()
}

/// Pure joint spin state indexed by sector.
#[derive(Debug, Clone, PartialEq)]
pub struct JointAmplitudes {
    dims: (usize, usize),
    amplitudes: Vec<Complex64>,
}

impl JointAmplitudes {
    pub fn product(psi1: &SpinState, psi2: &SpinState) -> Self {
        let amplitudes = psi1
            .amplitudes()
            .iter()
            .flat_map(|a| psi2.amplitudes().iter().map(move |b| a * b))
            .collect();
        Self { dims: (psi1.atom_count(), psi2.atom_count()), amplitudes }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn get(&self, sector: SpinSector) -> Option<Complex64> {
        sector.is_valid_for(self.dims.0, self.dims.1).then(|| {
            let i1 = ((sector.s1 + self.dims.0 as i32) / 2) as usize;
            let i2 = ((sector.s2 + self.dims.1 as i32) / 2) as usize;
            self.amplitudes[i1 * (self.dims.1 + 1) + i2]
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Amplitudes as an `(N₁+1) × (N₂+1)` matrix.
    pub fn as_matrix(&self) -> CMatrix {
        CMatrix::from_row_major(self.dims.0 + 1, self.dims.1 + 1, self.amplitudes.clone())
            .expect("amplitude count matches dims")
    }
}

/// `ψ₁(s1) ψ₂(s2) e^{iΦ(s1,s2)}`.
pub fn apply_phase_gate(psi1: &SpinState, psi2: &SpinState, table: &PhaseTable) -> Result<JointAmplitudes> {
    let dims = (psi1.atom_count(), psi2.atom_count());
    if table.dims() != dims {
        return Err(Error::DimensionMismatch { expected: dims, got: table.dims() });
    }
    let mut joint = JointAmplitudes::product(psi1, psi2);
    for (a, &phi) in joint.amplitudes.iter_mut().zip(table.entries()) {
        *a *= Complex64::cis(phi);
    }
    Ok(joint)
}

/// Reduced spin density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDensityMatrix {
    dims: (usize, usize),
    matrix: CMatrix,
}

impl JointDensityMatrix {
    pub fn from_matrix(dims: (usize, usize), matrix: CMatrix) -> Result<Self> {
        let d = (dims.0 + 1) * (dims.1 + 1);
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch { expected: (d, d), got: (matrix.rows(), matrix.cols()) });
        }
        Ok(Self { dims, matrix })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so Tr ρ² = Σ|ρ_ij|².
        self.matrix.frobenius_norm().powi(2)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }

    pub fn eigenvalues(&self, method: EigenMethod) -> Result<Vec<f64>> {
        Ok(eigh(&self.matrix, method, false)?.values)
    }
}

impl Serialize for JointDensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<[f64; 2]> = self.matrix.as_slice().iter().map(|z| [z.re, z.im]).collect();
        let mut st = serializer.serialize_struct("JointDensityMatrix", 2)?;
        st.serialize_field("dims", &[self.dims.0, self.dims.1])?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

/// Traces out the cavity, assuming the same remnant model in every sector:
/// `ρ_ij = ψ_i ψ_j* ⟨β_j|β_i⟩` with `β = δα e^{−i(s1+s2)δθ}`.
pub fn reduced_density(joint: &JointAmplitudes, remnant: &RemnantModel) -> JointDensityMatrix {
    let offsets: Vec<Complex64> = sectors(joint.dims.0, joint.dims.1).map(|s| remnant.offset(s.total())).collect();
    density_with_offsets(joint, &offsets)
}

/// As [`reduced_density`], but with one offset per sector (sector order).
pub fn reduced_density_from_offsets(joint: &JointAmplitudes, offsets: &[Complex64]) -> Result<JointDensityMatrix> {
    if offsets.len() != joint.amplitudes.len() {
        return Err(Error::DimensionMismatch { expected: (joint.amplitudes.len(), 1), got: (offsets.len(), 1) });
    }
    Ok(density_with_offsets(joint, offsets))
}

/// Final rotating-frame amplitudes of `trajectories`, one per sector in order.
pub fn offsets_from_trajectories(trajectories: &[Trajectory], dims: (usize, usize)) -> Result<Vec<Complex64>> {
    let expected: Vec<SpinSector> = sectors(dims.0, dims.1).collect();
    let got: Vec<SpinSector> = trajectories.iter().map(|t| t.sector).collect();
    if expected != got {
        return Err(invalid("trajectories", "need one trajectory per sector in s1-major order"));
    }
    Ok(trajectories.iter().map(Trajectory::final_alpha_c).collect())
}

fn density_with_offsets(joint: &JointAmplitudes, offsets: &[Complex64]) -> JointDensityMatrix {
    let psi = &joint.amplitudes;
    let d = psi.len();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = psi[i] * psi[j].conj() * coherent_overlap(offsets[j], offsets[i]);
        }
    }
    JointDensityMatrix { dims: joint.dims, matrix: m }
}

/// Transpose on subsystem 2: `[(s1,s2),(s1′,s2′)] ← [(s1,s2′),(s1′,s2)]`.
pub fn partial_transpose(rho: &JointDensityMatrix) -> JointDensityMatrix {
    let d2 = rho.dims.1 + 1;
    let d = rho.matrix.rows();
    let m = CMatrix::from_fn(d, d, |row, col| {
        let (i1, i2) = (row / d2, row % d2);
        let (j1, j2) = (col / d2, col % d2);
        rho.matrix[(i1 * d2 + j2, j1 * d2 + i2)]
    });
    JointDensityMatrix { dims: rho.dims, matrix: m }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    /// Logarithmic negativity in bits.
    pub log_negativity: f64,
    /// `log₂(min(N₁, N₂) + 1)`.
    pub max_entanglement: f64,
    pub normalized: f64,
}

impl EntanglementReport {
    fn new(log_negativity: f64, dims: (usize, usize)) -> Self {
        let max_entanglement = ((dims.0.min(dims.1) + 1) as f64).log2();
        let normalized = if max_entanglement > 0.0 { log_negativity / max_entanglement } else { 0.0 };
        Self { log_negativity, max_entanglement, normalized }
    }
}

impl Serialize for EntanglementReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("EntanglementReport", 3)?;
        st.serialize_field("E", &self.log_negativity)?;
        st.serialize_field("E_max", &self.max_entanglement)?;
        st.serialize_field("normalized", &self.normalized)?;
        st.end()
    }
}

/// `E = log₂ ‖ρ^{T₂}‖₁` with the default eigensolver.
pub fn log_negativity(rho: &JointDensityMatrix) -> Result<EntanglementReport> {
    log_negativity_with(rho, EigenMethod::default())
}

pub fn log_negativity_with(rho: &JointDensityMatrix, method: EigenMethod) -> Result<EntanglementReport> {
    let pt = partial_transpose(rho);
    let trace_norm: f64 = eigh(&pt.matrix, method, false)?.values.iter().map(|l| l.abs()).sum();
    Ok(EntanglementReport::new(trace_norm.log2(), rho.dims))
}

/// `2 log₂ Σσ` over the Schmidt coefficients of a pure joint state.
pub fn pure_state_negativity_oracle(joint: &JointAmplitudes) -> Result<f64> {
    let sum: f64 = singular_values(&joint.as_matrix())?.iter().sum();
    Ok(2.0 * sum.log2())
}

/// One point of a gate-strength × remnant sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub phi2: f64,
    pub delta_alpha: f64,
    pub delta_theta: f64,
    #[serde(flatten)]
    pub report: EntanglementReport,
}

/// `points` evenly spaced values over `[0, upper]`, inclusive.
pub fn gate_phase_grid(upper: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|k| upper * k as f64 / (points - 1) as f64).collect(),
    }
}

/// Negativity of `Φ = φ₂ s1 s2` over every `(φ₂, δα)` pair, φ₂-major.
/// Gate strengths are spread over the available cores; each point is
/// computed independently, so the result does not depend on the split.
pub fn negativity_sweep(
    psi1: &SpinState,
    psi2: &SpinState,
    phi2_grid: &[f64],
    delta_alphas: &[f64],
    delta_theta: f64,
) -> Result<Vec<SweepPoint>> {
    let remnants = delta_alphas
        .iter()
        .map(|&da| RemnantModel::new(Complex64::new(da, 0.0), delta_theta))
        .collect::<Result<Vec<_>>>()?;
    let dims = (psi1.atom_count(), psi2.atom_count());
    let column = |phi2: f64| -> Result<Vec<SweepPoint>> {
        let joint = apply_phase_gate(psi1, psi2, &PhaseTable::entangling(dims, phi2))?;
        remnants
            .iter()
            .map(|r| {
                let report = log_negativity(&reduced_density(&joint, r))?;
                Ok(SweepPoint { phi2, delta_alpha: r.delta_alpha.re, delta_theta, report })
            })
            .collect()
    };

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(phi2_grid.len()).max(1);
    let columns: Vec<Result<Vec<SweepPoint>>> = if workers == 1 {
        phi2_grid.iter().map(|&p| column(p)).collect()
    } else {
        let chunk = phi2_grid.len().div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = phi2_grid
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|&p| column(p)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
        })
    };
    let mut out = Vec::with_capacity(phi2_grid.len() * delta_alphas.len());
    for c in columns {
        out.extend(c?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::coherent_spin_state;
    use crate::phase::Stage;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

    fn plus(n: usize) -> SpinState {
        coherent_spin_state(n, FRAC_PI_2, 0.0)
    }

    fn bell() -> JointAmplitudes {
        apply_phase_gate(&plus(1), &plus(1), &PhaseTable::entangling((1, 1), FRAC_PI_4)).unwrap()
    }

    #[test]
    fn overlap_examples() {
        let z = Complex64::default();
        assert_eq!(coherent_overlap(z, z), Complex64::new(1.0, 0.0));
        let b = Complex64::new(0.3, -1.2);
        assert_abs_diff_eq!((coherent_overlap(b, b) - 1.0).norm(), 0.0, epsilon = 1e-15);
        let beta = Complex64::from_polar(0.5, -0.1);
        let gamma = Complex64::from_polar(0.5, 0.1);
        let ov = coherent_overlap(beta, gamma);
        // truncated Fock inner product, cutoff 40
        assert_abs_diff_eq!(ov.re, 0.9938020023716393, epsilon = 1e-14);
        assert_abs_diff_eq!(ov.im, 0.049400122167697944, epsilon = 1e-14);
    }

    #[test]
    fn zero_table_leaves_product() {
        let (p1, p2) = (plus(3), coherent_spin_state(2, 1.0, 0.4));
        let out = apply_phase_gate(&p1, &p2, &PhaseTable::zeros((3, 2), Stage::Total)).unwrap();
        assert_eq!(out, JointAmplitudes::product(&p1, &p2));
        assert!(apply_phase_gate(&p1, &p2, &PhaseTable::zeros((2, 2), Stage::Total)).is_err());
    }

    #[test]
    fn bell_state_properties() {
        let joint = bell();
        assert_abs_diff_eq!(joint.norm(), 1.0, epsilon = 1e-15);
        let rho = reduced_density(&joint, &RemnantModel::ideal());
        let mut ev = partial_transpose(&rho).eigenvalues(EigenMethod::Jacobi).unwrap();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
            let report = log_negativity_with(&rho, method).unwrap();
            assert_abs_diff_eq!(report.log_negativity, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(report.normalized, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(pure_state_negativity_oracle(&joint).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn product_states_carry_no_entanglement() {
        let joint = JointAmplitudes::product(&plus(4), &coherent_spin_state(3, 0.7, 1.1));
        let rho = reduced_density(&joint, &RemnantModel::new(Complex64::new(0.5, 0.0), 0.1).unwrap());
        assert!(log_negativity(&rho).unwrap().log_negativity.abs() < 1e-8);
        assert!(pure_state_negativity_oracle(&joint).unwrap().abs() < 1e-12);
        let pt = partial_transpose(&reduced_density(&joint, &RemnantModel::ideal()));
        let norm: f64 = pt.eigenvalues(EigenMethod::Tridiagonal).unwrap().iter().map(|l| l.abs()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ideal_remnant_gives_projector() {
        let joint = apply_phase_gate(&plus(3), &plus(3), &PhaseTable::entangling((3, 3), 0.3)).unwrap();
        let rho = reduced_density(&joint, &RemnantModel::ideal());
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
        let psi = joint.amplitudes();
        for i in 0..psi.len() {
            for j in 0..psi.len() {
                assert_eq!(rho.matrix()[(i, j)], psi[i] * psi[j].conj());
            }
        }
        // δθ = 0: every sector gets the same offset, so the state stays pure
        let shifted = reduced_density(&joint, &RemnantModel::new(Complex64::new(0.8, 0.3), 0.0).unwrap());
        assert_abs_diff_eq!(shifted.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn remnant_damps_coherences() {
        let joint = apply_phase_gate(&plus(20), &plus(20), &PhaseTable::entangling((20, 20), 0.1)).unwrap();
        let pure = reduced_density(&joint, &RemnantModel::ideal());
        let remnant = RemnantModel::new(Complex64::new(0.5, 0.0), 0.1).unwrap();
        let damped = reduced_density(&joint, &remnant);
        let all: Vec<SpinSector> = sectors(20, 20).collect();
        for (i, a) in all.iter().enumerate().step_by(7) {
            for (j, b) in all.iter().enumerate().step_by(5) {
                let ds = (a.total() - b.total()) as f64;
                let expected = (-0.25 * (Complex64::new(1.0, 0.0) - Complex64::cis(ds * 0.1))).exp().norm();
                let ratio = damped.matrix()[(i, j)].norm() / pure.matrix()[(i, j)].norm();
                assert_abs_diff_eq!(ratio, expected, epsilon = 1e-12);
                if ds != 0.0 {
                    assert!(ratio < 1.0);
                }
            }
        }
    }

    #[test]
    fn partial_transpose_of_diagonal_is_identity_map() {
        let d = CMatrix::from_fn(6, 6, |i, j| if i == j { Complex64::new((i + 1) as f64 / 21.0, 0.0) } else { Complex64::default() });
        let rho = JointDensityMatrix::from_matrix((1, 2), d.clone()).unwrap();
        assert_eq!(partial_transpose(&rho).matrix(), &d);
        assert!(JointDensityMatrix::from_matrix((2, 2), d).is_err());
    }

    #[test]
    fn regression_values() {
        // numpy SVD / eigvalsh of the same constructions
        let cases = [(FRAC_PI_2, 0.0), (FRAC_PI_8, 1.9018312445780818), (PI / 16.0, 1.606240988840751)];
        for (phi2, expected) in cases {
            let joint = apply_phase_gate(&plus(4), &plus(4), &PhaseTable::entangling((4, 4), phi2)).unwrap();
            assert_abs_diff_eq!(pure_state_negativity_oracle(&joint).unwrap(), expected, epsilon = 1e-12);
        }
        let joint = apply_phase_gate(&plus(2), &plus(2), &PhaseTable::entangling((2, 2), FRAC_PI_8)).unwrap();
        let rho = reduced_density(&joint, &RemnantModel::new(Complex64::new(0.5, 0.0), 0.1).unwrap());
        assert_abs_diff_eq!(log_negativity(&rho).unwrap().log_negativity, 1.3721320866791151, epsilon = 1e-12);
        let joint = apply_phase_gate(&plus(4), &plus(4), &PhaseTable::entangling((4, 4), PI / 16.0)).unwrap();
        let rho = reduced_density(&joint, &RemnantModel::new(Complex64::new(1.0, 0.0), 0.3).unwrap());
        assert_abs_diff_eq!(log_negativity(&rho).unwrap().log_negativity, 0.961922882300046, epsilon = 1e-12);
    }

    #[test]
    fn per_sector_offsets_match_uniform_model() {
        let joint = apply_phase_gate(&plus(2), &plus(3), &PhaseTable::entangling((2, 3), 0.4)).unwrap();
        let remnant = RemnantModel::new(Complex64::new(0.3, 0.2), 0.25).unwrap();
        let offsets: Vec<Complex64> = sectors(2, 3).map(|s| remnant.offset(s.total())).collect();
        let a = reduced_density(&joint, &remnant);
        let b = reduced_density_from_offsets(&joint, &offsets).unwrap();
        assert_eq!(a, b);
        assert!(reduced_density_from_offsets(&joint, &offsets[1..]).is_err());
    }

    #[test]
    fn json_layouts() {
        let rho = reduced_density(&bell(), &RemnantModel::ideal());
        let v: serde_json::Value = serde_json::from_str(&crate::format::to_json_string(&rho)).unwrap();
        assert_eq!(v["dims"], serde_json::json!([1, 1]));
        assert_eq!(v["entries"].as_array().unwrap().len(), 16);
        assert_eq!(v["entries"][0].as_array().unwrap().len(), 2);
        let report = log_negativity(&rho).unwrap();
        let v: serde_json::Value = serde_json::to_value(report).unwrap();
        assert!(v.get("E").is_some() && v.get("E_max").is_some() && v.get("normalized").is_some());
    }

    #[test]
    fn sweep_grid_layout() {
        assert_eq!(gate_phase_grid(1.0, 3), vec![0.0, 0.5, 1.0]);
        let pts = negativity_sweep(&plus(2), &plus(2), &gate_phase_grid(0.5, 4), &[0.0, 0.5], 0.1).unwrap();
        assert_eq!(pts.len(), 8);
        assert_eq!((pts[1].phi2, pts[1].delta_alpha), (0.0, 0.5));
        assert!(pts[0].report.log_negativity.abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn density_matrix_is_physical(
            n1 in 1usize..5, n2 in 1usize..5, phi2 in 0.0..PI,
            da_re in -1.5..1.5f64, da_im in -1.5..1.5f64, dt in -0.5..0.5f64,
        ) {
            let joint = apply_phase_gate(&plus(n1), &plus(n2), &PhaseTable::entangling((n1, n2), phi2)).unwrap();
            let rho = reduced_density(&joint, &RemnantModel::new(Complex64::new(da_re, da_im), dt).unwrap());
            prop_assert!(rho.hermiticity_defect() < 1e-12);
            prop_assert!((rho.trace() - 1.0).norm() < 1e-10);
            let min = rho.eigenvalues(EigenMethod::Tridiagonal).unwrap()[0];
            prop_assert!(min > -1e-10, "min eigenvalue {min}");
            prop_assert!(partial_transpose(&rho).hermiticity_defect() < 1e-12);
            prop_assert!(log_negativity(&rho).unwrap().log_negativity > -1e-10);
        }

        #[test]
        fn negativity_is_gauge_invariant(n in 1usize..6, phi2 in 0.0..PI, c in -10.0..10.0f64, da in 0.0..1.0f64) {
            let table = PhaseTable::entangling((n, n), phi2);
            let remnant = RemnantModel::new(Complex64::new(da, 0.0), 0.1).unwrap();
            let a = reduced_density(&apply_phase_gate(&plus(n), &plus(n), &table).unwrap(), &remnant);
            let b = reduced_density(&apply_phase_gate(&plus(n), &plus(n), &table.shifted(c)).unwrap(), &remnant);
            prop_assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
            let ea = log_negativity(&a).unwrap().log_negativity;
            let eb = log_negativity(&b).unwrap().log_negativity;
            prop_assert!((ea - eb).abs() < 1e-10);
        }

        #[test]
        fn pure_path_matches_schmidt_oracle(n1 in 1usize..7, n2 in 1usize..7, phi2 in 0.0..PI) {
            let joint = apply_phase_gate(&plus(n1), &plus(n2), &PhaseTable::entangling((n1, n2), phi2)).unwrap();
            let e = log_negativity(&reduced_density(&joint, &RemnantModel::ideal())).unwrap().log_negativity;
            prop_assert!((e - pure_state_negativity_oracle(&joint).unwrap()).abs() < 1e-8);
        }

        #[test]
        fn remnant_never_adds_entanglement(n in 1usize..5, phi2 in 0.0..1.0f64, dt in -0.5..0.5f64) {
            let joint = apply_phase_gate(&plus(n), &plus(n), &PhaseTable::entangling((n, n), phi2)).unwrap();
            let mut last = f64::INFINITY;
            for da in [0.0, 0.25, 0.5, 1.0] {
                let rho = reduced_density(&joint, &RemnantModel::new(Complex64::new(da, 0.0), dt).unwrap());
                let e = log_negativity(&rho).unwrap().log_negativity;
                prop_assert!(e <= last + 1e-10);
                last = e;
            }
        }
    }
}
