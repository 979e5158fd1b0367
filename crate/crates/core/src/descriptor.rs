//! JSON descriptors for systems, observables, homomorphisms and windows.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::{shift_window, FolnerWindow, GroupElement, HomSet, Homomorphism, WindowSchedule};
use crate::operator::{ComplexMatrix, State};
use crate::systems::{
    clock_shift_system, cyclic_system, product_system, rotation_algebra_system, shift_system, trivial_system,
    DynamicalSystem, FiniteSystem, LocalObservable, Observable, SystemHandle,
};

/// A complex number written as a real number or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexEntry {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexEntry::Real(x) => Complex64::new(x, 0.0),
            ComplexEntry::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

pub type MatrixEntries = Vec<Vec<ComplexEntry>>;

pub fn matrix_from_entries(rows: &MatrixEntries) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|z| z.value()).collect()).collect();
    ComplexMatrix::from_rows(&rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemDescriptor {
    /// Spin lattice over Z^q with local dimension `d`.
    Shift { q: usize, d: usize },
    /// `Ad(U*)` on `M_Q` with `U = diag(e^{2πi p j/Q})`.
    Rotation {
        p: i64,
        #[serde(rename = "Q")]
        modulus: usize,
    },
    /// Z²-action by clock and shift conjugation on `M_Q`.
    ClockShift {
        #[serde(rename = "Q")]
        modulus: usize,
    },
    /// Cyclic permutation of `C^n` with the uniform state.
    Cyclic { n: usize },
    /// Identity action of Z^q on `M_n`.
    Trivial { n: usize, q: usize },
    /// `(A ⊗ Ā, ω ⊗ ω̄, τ ⊗ τ̄)` of a finite system.
    Product { base: Box<SystemDescriptor> },
    /// Explicit density matrix and unitary generators.
    Matrix {
        state: MatrixEntries,
        generators: Vec<MatrixEntries>,
        #[serde(default)]
        named: BTreeMap<String, MatrixEntries>,
        #[serde(default)]
        label: Option<String>,
    },
}

impl SystemDescriptor {
    pub fn build(&self) -> Result<SystemHandle> {
        Ok(match self {
            SystemDescriptor::Shift { q, d } => shift_system(*q, *d)?.into(),
            other => other.build_finite()?.into(),
        })
    }

    pub fn build_finite(&self) -> Result<FiniteSystem> {
        match self {
            SystemDescriptor::Shift { .. } => invalid("the shift system is not finite-dimensional"),
            SystemDescriptor::Rotation { p, modulus } => rotation_algebra_system(*p, *modulus),
            SystemDescriptor::ClockShift { modulus } => clock_shift_system(*modulus),
            SystemDescriptor::Cyclic { n } => cyclic_system(*n),
            SystemDescriptor::Trivial { n, q } => trivial_system(*n, *q),
            SystemDescriptor::Product { base } => product_system(&base.build_finite()?),
            SystemDescriptor::Matrix { state, generators, named, label } => {
                let state = State::new(matrix_from_entries(state)?)?;
                let generators = generators.iter().map(matrix_from_entries).collect::<Result<Vec<_>>>()?;
                let mut sys = FiniteSystem::new(state, generators)?;
                for (name, m) in named {
                    sys = sys.with_named(name.clone(), matrix_from_entries(m)?)?;
                }
                if let Some(label) = label {
                    sys = sys.with_label(label.clone());
                }
                Ok(sys)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: ComplexEntry,
    pub of: ObservableDescriptor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableDescriptor {
    Identity,
    /// A named operator of a finite system (`U`, `V`, `P`, ...).
    Named {
        name: String,
    },
    Matrix {
        rows: MatrixEntries,
    },
    /// `|e_i⟩⟨e_i|` in a finite system.
    BasisProjector {
        index: usize,
    },
    /// Tensor product of generalized Pauli letters on the listed sites.
    Pauli {
        sites: Vec<GroupElement>,
        letters: String,
    },
    /// Explicit tensor on the listed sites of a spin lattice.
    Local {
        sites: Vec<GroupElement>,
        tensor: MatrixEntries,
    },
    Adjoint {
        of: Box<ObservableDescriptor>,
    },
    Product {
        factors: Vec<ObservableDescriptor>,
    },
    Combination {
        terms: Vec<Term>,
    },
}

impl ObservableDescriptor {
    pub fn build(&self, sys: &SystemHandle) -> Result<Observable> {
        let obs = self.build_unchecked(sys)?;
        sys.check(&obs)?;
        Ok(obs)
    }

    fn build_unchecked(&self, sys: &SystemHandle) -> Result<Observable> {
        let finite = || match sys {
            SystemHandle::Finite(f) => Ok(f),
            SystemHandle::QuasiLocal(_) => invalid(format!("{} needs a finite system", self.kind())),
        };
        let site_dim = || match sys {
            SystemHandle::QuasiLocal(q) => Ok(q.site_dim()),
            SystemHandle::Finite(_) => invalid(format!("{} needs the shift system", self.kind())),
        };
        Ok(match self {
            ObservableDescriptor::Identity => sys.identity(),
            ObservableDescriptor::Named { name } => {
                let f = finite()?;
                match f.named(name) {
                    Some(m) => m.clone().into(),
                    None => {
                        let known: Vec<&str> = f.names().collect();
                        return invalid(format!("no operator named {name:?}; known: {}", known.join(", ")));
                    }
                }
            }
            ObservableDescriptor::Matrix { rows } => {
                finite()?;
                matrix_from_entries(rows)?.into()
            }
            ObservableDescriptor::BasisProjector { index } => {
                let n = finite()?.dim();
                if *index >= n {
                    return invalid(format!("basis index {index} out of range for dimension {n}"));
                }
                ComplexMatrix::unit(n, *index, *index).into()
            }
            ObservableDescriptor::Pauli { sites, letters } => {
                LocalObservable::pauli(site_dim()?, sites, letters)?.into()
            }
            ObservableDescriptor::Local { sites, tensor } => {
                LocalObservable::new(site_dim()?, sites.clone(), matrix_from_entries(tensor)?)?.into()
            }
            ObservableDescriptor::Adjoint { of } => sys.adjoint(&of.build(sys)?),
            ObservableDescriptor::Product { factors } => {
                if factors.is_empty() {
                    return invalid("product needs at least one factor");
                }
                let built = factors.iter().map(|f| f.build(sys)).collect::<Result<Vec<_>>>()?;
                sys.multiply(&built)
            }
            ObservableDescriptor::Combination { terms } => {
                if terms.is_empty() {
                    return invalid("combination needs at least one term");
                }
                let built = terms.iter().map(|t| t.of.build(sys)).collect::<Result<Vec<_>>>()?;
                let pairs: Vec<(Complex64, &Observable)> = terms.iter().map(|t| t.coeff.value()).zip(&built).collect();
                sys.combine(&pairs)
            }
        })
    }

    fn kind(&self) -> &'static str {
        match self {
            ObservableDescriptor::Identity => "identity",
            ObservableDescriptor::Named { .. } => "named",
            ObservableDescriptor::Matrix { .. } => "matrix",
            ObservableDescriptor::BasisProjector { .. } => "basis_projector",
            ObservableDescriptor::Pauli { .. } => "pauli",
            ObservableDescriptor::Local { .. } => "local",
            ObservableDescriptor::Adjoint { .. } => "adjoint",
            ObservableDescriptor::Product { .. } => "product",
            ObservableDescriptor::Combination { .. } => "combination",
        }
    }
}

/// A scalar `m` (meaning `m·I`) or an explicit integer matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HomDescriptor {
    Scalar(i64),
    Matrix(Vec<Vec<i64>>),
}

impl HomDescriptor {
    pub fn build(&self, q: usize) -> Result<Homomorphism> {
        let phi = match self {
            HomDescriptor::Scalar(m) => Homomorphism::scalar(q, *m),
            HomDescriptor::Matrix(rows) => Homomorphism::from_matrix(rows.clone())?,
        };
        if phi.dim() != q {
            return invalid(format!("homomorphism acts on Z^{} but the system is over Z^{q}", phi.dim()));
        }
        Ok(phi)
    }
}

pub fn build_hom_set(homs: &[HomDescriptor], q: usize) -> Result<HomSet> {
    HomSet::new(homs.iter().map(|h| h.build(q)).collect::<Result<Vec<_>>>()?)
}

/// Box windows `n_min..=n_max` in steps of `stride`, optionally translated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowDescriptor {
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "one")]
    pub stride: usize,
    /// Lattice dimension; defaults to the system's.
    #[serde(default)]
    pub q: Option<usize>,
    #[serde(default)]
    pub shift: Option<GroupElement>,
}

fn one() -> usize {
    1
}

impl WindowDescriptor {
    pub fn lattice_dim(&self, default_q: Option<usize>) -> Result<usize> {
        match (self.q, default_q) {
            (Some(q), Some(d)) if q != d => invalid(format!("windows over Z^{q} do not match a system over Z^{d}")),
            (Some(q), _) | (None, Some(q)) => Ok(q),
            (None, None) => invalid("windows need a lattice dimension `q`"),
        }
    }

    pub fn schedule(&self, default_q: Option<usize>) -> Result<WindowSchedule> {
        WindowSchedule::new(self.lattice_dim(default_q)?, self.n_min, self.n_max, self.stride)
    }

    pub fn build(&self, default_q: Option<usize>) -> Result<Vec<FolnerWindow>> {
        let schedule = self.schedule(default_q)?;
        let windows = schedule.windows()?;
        match &self.shift {
            None => Ok(windows),
            Some(g) if g.dim() != schedule.q => invalid("window shift has the wrong dimension"),
            Some(g) => Ok(windows.iter().map(|w| shift_window(w, g)).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_named_systems() {
        let d: SystemDescriptor = serde_json::from_str(r#"{"kind":"rotation","p":1,"Q":5}"#).unwrap();
        let sys = d.build().unwrap();
        assert_eq!(sys.backend_name(), "finite");
        let v: ObservableDescriptor =
            serde_json::from_str(r#"{"kind":"adjoint","of":{"kind":"named","name":"V"}}"#).unwrap();
        let obs = v.build(&sys).unwrap();
        assert!(obs.as_matrix().is_some());
        let shift: SystemDescriptor = serde_json::from_str(r#"{"kind":"shift","q":1,"d":2}"#).unwrap();
        assert_eq!(shift.build().unwrap().backend_name(), "quasi_local");
    }

    #[test]
    fn rejects_unknown_keys_and_wrong_backends() {
        assert!(serde_json::from_str::<SystemDescriptor>(r#"{"kind":"shift","q":1,"d":2,"x":0}"#).is_err());
        assert!(serde_json::from_str::<WindowDescriptor>(r#"{"n_min":1,"n_max":2,"bogus":1}"#).is_err());
        let shift = SystemDescriptor::Shift { q: 1, d: 2 }.build().unwrap();
        let named = ObservableDescriptor::Named { name: "V".into() };
        assert!(named.build(&shift).is_err());
    }

    #[test]
    fn projector_combination() {
        let sys = SystemDescriptor::Shift { q: 1, d: 2 }.build().unwrap();
        let p: ObservableDescriptor = serde_json::from_str(
            r#"{"kind":"combination","terms":[
                {"coeff":0.5,"of":{"kind":"identity"}},
                {"coeff":[0.5,0],"of":{"kind":"pauli","sites":[[0]],"letters":"Z"}}]}"#,
        )
        .unwrap();
        let a = p.build(&sys).unwrap();
        assert!((sys.expectation(&a).re - 0.5).abs() < 1e-15);
        assert_eq!(sys.min_eigenvalue(&a), Some(0.0));
    }

    #[test]
    fn homs_and_windows() {
        let h: Vec<HomDescriptor> = serde_json::from_str("[1, 2, [[0,1],[1,0]]]").unwrap();
        assert!(build_hom_set(&h[..2], 1).is_ok());
        assert!(h[2].build(2).is_ok());
        assert!(h[2].build(1).is_err());
        let w: WindowDescriptor = serde_json::from_str(r#"{"n_min":1,"n_max":5,"stride":2,"shift":[3]}"#).unwrap();
        let ws = w.build(Some(1)).unwrap();
        assert_eq!(ws.iter().map(FolnerWindow::index).collect::<Vec<_>>(), vec![1, 3, 5]);
        assert!(ws[0].contains(&GroupElement::scalar(4)));
        assert!(w.build(Some(2)).is_err());
    }
}
