use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::elements::{element_action, internal_index};
use super::netlist::{CircuitIR, ElementKind, Polarization, TransverseMode};
use super::PhotonicsError;
use crate::channel::{Basis, DensityMatrix4};
use crate::numerics::CMatrix;

/// Allowed entry of `U†U − 1` for a compiled circuit.
pub const UNITARITY_TOL: f64 = 1e-9;

/// Single-photon amplitudes over polarization ⊗ mode ⊗ path, indexed
/// `internal · paths + path` (see [`internal_index`]).
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonState {
    amplitudes: Vec<C64>,
    path_count: usize,
}

impl PhotonState {
    pub fn zeros(path_count: usize) -> Self {
        assert!(path_count >= 1, "at least one path");
        Self { amplitudes: vec![C64::new(0.0, 0.0); 4 * path_count], path_count }
    }

    pub fn basis(internal: usize, path: usize, path_count: usize) -> Self {
        let mut s = Self::zeros(path_count);
        s.amplitudes[internal * path_count + path] = C64::new(1.0, 0.0);
        s
    }

    /// Places the two-qubit amplitudes `system` on `path`.
    pub fn from_system(system: &[C64; 4], path: usize, path_count: usize) -> Self {
        let mut s = Self::zeros(path_count);
        for (i, a) in system.iter().enumerate() {
            s.amplitudes[i * path_count + path] = *a;
        }
        s
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn path_count(&self) -> usize {
        self.path_count
    }

    pub fn amplitude(&self, pol: Polarization, mode: TransverseMode, path: usize) -> C64 {
        self.amplitudes[internal_index(pol, mode) * self.path_count + path]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Total probability on `path`.
    pub fn path_probability(&self, path: usize) -> f64 {
        (0..4).map(|i| self.amplitudes[i * self.path_count + path].norm_sqr()).sum()
    }

    /// Unnormalised two-qubit amplitudes on `path`.
    pub fn path_component(&self, path: usize) -> [C64; 4] {
        std::array::from_fn(|i| self.amplitudes[i * self.path_count + path])
    }

    /// Trace over the path index; computational basis.
    pub fn reduced_system_state(&self) -> Result<DensityMatrix4, PhotonicsError> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > 1e-9 {
            return Err(PhotonicsError::NotNormalized { norm_sqr: n });
        }
        let mut rho = CMatrix::zeros(4, 4);
        for p in 0..self.path_count {
            let v = self.path_component(p);
            rho = &rho + &CMatrix::outer(&v, &v);
        }
        Ok(DensityMatrix4::new(rho.hermitian_part(), Basis::Computational)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledDetector {
    pub id: String,
    pub path: usize,
}

/// Unitary of a validated circuit together with its wiring.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    unitary: CMatrix,
    path_count: usize,
    path_table: BTreeMap<String, usize>,
    detectors: Vec<CompiledDetector>,
    prep: Option<(usize, usize)>,
}

impl CompiledCircuit {
    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn path_count(&self) -> usize {
        self.path_count
    }

    pub fn path_index(&self, label: &str) -> Option<usize> {
        self.path_table.get(label).copied()
    }

    /// Label of path `index`; vacuum ports added by the compiler have none.
    pub fn path_label(&self, index: usize) -> Option<&str> {
        self.path_table.iter().find(|(_, &i)| i == index).map(|(l, _)| l.as_str())
    }

    pub fn detectors(&self) -> &[CompiledDetector] {
        &self.detectors
    }

    pub fn unitarity_defect(&self) -> f64 {
        (&self.unitary.adjoint() * &self.unitary).max_diff(&CMatrix::identity(self.unitary.rows()))
    }

    /// The prepared photon, if the circuit declares a source.
    pub fn prep_state(&self) -> Option<PhotonState> {
        self.prep.map(|(internal, path)| PhotonState::basis(internal, path, self.path_count))
    }

    pub fn propagate(&self, input: &PhotonState) -> PhotonState {
        assert_eq!(input.path_count, self.path_count, "state built for a different circuit");
        PhotonState { amplitudes: self.unitary.apply(&input.amplitudes), path_count: self.path_count }
    }

    /// Output for the prepared photon.
    pub fn run(&self) -> Result<PhotonState, PhotonicsError> {
        let input = self.prep_state().ok_or(PhotonicsError::NoSource)?;
        Ok(self.propagate(&input))
    }

    /// Probability per detector, in declaration order.
    pub fn detector_probabilities(&self, state: &PhotonState) -> Vec<(String, f64)> {
        self.detectors.iter().map(|d| (d.id.clone(), state.path_probability(d.path))).collect()
    }

    /// Detector probabilities for a mixed two-qubit input entering `path`.
    pub fn detector_probabilities_mixed(&self, rho: &DensityMatrix4, path: usize) -> Vec<(String, f64)> {
        let r = rho.to_computational().into_matrix();
        let p = self.path_count;
        let columns: Vec<Vec<C64>> = (0..4).map(|i| self.unitary.column(i * p + path)).collect();
        self.detectors
            .iter()
            .map(|d| {
                let mut prob = C64::new(0.0, 0.0);
                for k in 0..4 {
                    let row = k * p + d.path;
                    for i in 0..4 {
                        for j in 0..4 {
                            prob += columns[i][row] * r[(i, j)] * columns[j][row].conj();
                        }
                    }
                }
                (d.id.clone(), prob.re)
            })
            .collect()
    }
}

/// Builds the circuit unitary as the ordered product of element unitaries.
///
/// Each element maps its input slots to its output slots. Output slots that
/// are not also inputs start empty, so the unitary is completed by sending
/// them to the input slots that are not outputs, in order. Missing second
/// ports of two-port elements get fresh vacuum paths after the labelled ones.
pub fn compile(ir: &CircuitIR) -> Result<CompiledCircuit, PhotonicsError> {
    let labelled = ir.path_table().len();
    let vacuum_ports: usize = ir.elements().iter().map(|e| e.kind.input_ports().saturating_sub(e.inputs.len())).sum();
    let path_count = (labelled + vacuum_ports).max(1);
    let dim = 4 * path_count;
    let slot = |internal: usize, path: usize| internal * path_count + path;

    let mut unitary = CMatrix::identity(dim);
    let mut next_vacuum = labelled;
    for e in ir.elements() {
        if matches!(e.kind, ElementKind::Source { .. }) {
            continue;
        }
        let mut ins: Vec<usize> = e.inputs.iter().map(|p| ir.path_table()[p]).collect();
        while ins.len() < e.kind.input_ports() {
            ins.push(next_vacuum);
            next_vacuum += 1;
        }
        let outs: Vec<usize> = e.outputs.iter().map(|p| ir.path_table()[p]).collect();

        let mut step = CMatrix::identity(dim);
        let mut touched: Vec<usize> = ins.clone();
        touched.extend(outs.iter().filter(|o| !ins.contains(o)));
        for &path in &touched {
            for i in 0..4 {
                step[(slot(i, path), slot(i, path))] = C64::new(0.0, 0.0);
            }
        }
        for (port, &path) in ins.iter().enumerate() {
            for sys in 0..4 {
                for (sys_out, out_port, amp) in element_action(&e.kind, port, sys) {
                    step[(slot(sys_out, outs[out_port]), slot(sys, path))] += amp;
                }
            }
        }
        let fresh = outs.iter().filter(|o| !ins.contains(o));
        let freed = ins.iter().filter(|i| !outs.contains(i));
        for (&from, &to) in fresh.zip(freed) {
            for sys in 0..4 {
                step[(slot(sys, to), slot(sys, from))] = C64::new(1.0, 0.0);
            }
        }
        unitary = &step * &unitary;
    }

    let compiled = CompiledCircuit {
        unitary,
        path_count,
        path_table: ir.path_table().clone(),
        detectors: ir
            .detectors()
            .iter()
            .map(|d| CompiledDetector { id: d.id.clone(), path: ir.path_table()[&d.path] })
            .collect(),
        prep: ir.prep().map(|p| (internal_index(p.pol, p.mode), ir.path_table()[&p.path])),
    };
    let defect = compiled.unitarity_defect();
    if defect > UNITARITY_TOL {
        return Err(PhotonicsError::NonUnitaryComposite { defect });
    }
    Ok(compiled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonics::parse_netlist;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn empty_circuit_is_identity() {
        let c = compile(&parse_netlist("# nothing\n").unwrap()).unwrap();
        assert_eq!(c.path_count(), 1);
        assert_eq!(c.unitary(), &CMatrix::identity(4));
    }

    #[test]
    fn hadamard_plate() {
        let c = compile(&parse_netlist("hwp theta=22.5 ref=H in=p0 out=p0").unwrap()).unwrap();
        let s = FRAC_1_SQRT_2;
        let h = CMatrix::from_real_rows(&[&[-s, s], &[s, s]]);
        let want = h.kron(&CMatrix::identity(2));
        assert!(c.unitary().max_diff(&want) < 1e-15);
    }

    #[test]
    fn beam_splitter_with_vacuum_port() {
        let ir = parse_netlist("bs in=a out=b,c\ndetector id=x in=b\ndetector id=y in=c").unwrap();
        let c = compile(&ir).unwrap();
        assert_eq!(c.path_count(), 4);
        let out = c.propagate(&PhotonState::basis(1, c.path_index("a").unwrap(), c.path_count()));
        let probs = c.detector_probabilities(&out);
        assert!((probs[0].1 - 0.5).abs() < 1e-15 && (probs[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reduced_state_of_path_superposition() {
        let s = FRAC_1_SQRT_2;
        let mut st = PhotonState::zeros(2);
        st.amplitudes[2] = C64::new(s, 0.0);
        st.amplitudes[3 * 2 + 1] = C64::new(s, 0.0);
        let rho = st.reduced_system_state().unwrap();
        let want = CMatrix::diag_real(&[0.0, 0.5, 0.0, 0.5]);
        assert!(rho.matrix().max_diff(&want) < 1e-15);
    }
}
