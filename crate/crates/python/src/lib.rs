use extrainv_core::approx::{best_extra_invariant, best_invariant, evaluate_candidate};
use extrainv_core::config::ScenarioConfig;
use extrainv_core::extra::{build_partition, canonical_generator, check_extra_invariance, decomposable_mi_check, mask_operator};
use extrainv_core::subspace::{length, principal_membership, span_invariant, Subspace};
use extrainv_core::zak::{zak_t, zak_t_inv, zak_vector, CMatrix, ZakT};
use extrainv_core::{scenarios, ChainMember, Error, Setting, Vector};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(extrainv, ExtraInvError, PyException);

fn err(e: Error) -> PyErr {
    ExtraInvError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| ExtraInvError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn vectors(vs: Vec<Vec<Complex64>>) -> Vec<Vector> {
    vs.into_iter().map(Vector::from_vec).collect()
}

fn member(name: &str) -> PyResult<ChainMember> {
    match name {
        "gamma" => Ok(ChainMember::Gamma),
        "delta" => Ok(ChainMember::Delta),
        "t" => Ok(ChainMember::T),
        other => Err(ExtraInvError::new_err(format!("unknown subgroup {other:?}; use gamma, delta or t"))),
    }
}

/// A finite abelian group acting freely on a weighted point set, with the
/// chain `Gamma <= Delta <= T`.
#[pyclass(name = "Scenario", frozen)]
struct PyScenario {
    setting: Setting,
}

impl PyScenario {
    fn span(&self, generators: Vec<Vec<Complex64>>, over: &str) -> PyResult<Subspace> {
        span_invariant(&self.setting, &vectors(generators), member(over)?).map_err(err)
    }
}

#[pymethods]
impl PyScenario {
    /// Built-in scenario by name; see `Scenario.names()`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        scenarios::by_name(name)
            .map(|setting| Self { setting })
            .ok_or_else(|| ExtraInvError::new_err(format!("unknown scenario {name:?}")))
    }

    /// Scenario from the JSON config format of the command line tool.
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        let cfg = ScenarioConfig::from_json_str(text).map_err(err)?;
        let setting = cfg.build_setting(cfg.tol()).map_err(err)?;
        Ok(Self { setting })
    }

    #[staticmethod]
    fn names() -> Vec<&'static str> {
        scenarios::NAMES.to_vec()
    }

    #[getter]
    fn points(&self) -> usize {
        self.setting.points()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.setting.weights().to_vec()
    }

    #[getter]
    fn group_order(&self) -> usize {
        self.setting.group().order()
    }

    #[getter]
    fn fiber_dim(&self) -> usize {
        self.setting.fiber_dim()
    }

    #[getter]
    fn omega_len(&self) -> usize {
        self.setting.omega_len()
    }

    /// Blocks `B_xi` as lists of dual-group indices.
    fn partition(&self) -> Vec<Vec<usize>> {
        build_partition(&self.setting).blocks
    }

    /// `Z_T[f]`, one row per dual point.
    fn zak_t(&self, f: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&zak_t(&self.setting, &Vector::from_vec(f)).map_err(err)?.values))
    }

    fn zak_t_inv(&self, z: Vec<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
        let nrows = z.len();
        let ncols = z.first().map_or(0, |r| r.len());
        if z.iter().any(|r| r.len() != ncols) {
            return Err(ExtraInvError::new_err("ragged rows"));
        }
        let values = CMatrix::from_row_iterator(nrows, ncols, z.into_iter().flatten());
        Ok(zak_t_inv(&self.setting, &ZakT { values }).map_err(err)?.iter().copied().collect())
    }

    /// `Z[f]`, rows indexed by `Omega`.
    fn zak_vector(&self, f: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&zak_vector(&self.setting, &Vector::from_vec(f)).map_err(err)?.values))
    }

    fn norm(&self, f: Vec<Complex64>) -> f64 {
        extrainv_core::subspace::weighted_norm(self.setting.weights(), &Vector::from_vec(f))
    }

    /// `M_xi f` for the block at position `xi`.
    fn mask(&self, xi: usize, f: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        Ok(mask_operator(&self.setting, xi, &Vector::from_vec(f)).map_err(err)?.iter().copied().collect())
    }

    /// Whether `f` lies in the principal space generated by `psi`.
    fn in_principal(&self, f: Vec<Complex64>, psi: Vec<Complex64>) -> PyResult<bool> {
        let m = principal_membership(&self.setting, &Vector::from_vec(f), &Vector::from_vec(psi)).map_err(err)?;
        Ok(m.is_some())
    }

    fn canonical_generator(&self) -> PyResult<Vec<Complex64>> {
        Ok(canonical_generator(&self.setting).map_err(err)?.iter().copied().collect())
    }

    /// Extra invariance report for the space spanned by the orbits of
    /// `generators` under the named subgroup.
    #[pyo3(signature = (generators, over = "gamma"))]
    fn check<'py>(&self, py: Python<'py>, generators: Vec<Vec<Complex64>>, over: &str) -> PyResult<Bound<'py, PyAny>> {
        let v = self.span(generators, over)?;
        let report = check_extra_invariance(&self.setting, &v).map_err(err)?;
        let decomposable = decomposable_mi_check(&self.setting, &v).map_err(err)?;
        let out = serde_json::json!({
            "dim": v.dim(),
            "length": length(&self.setting, &v).map_err(err)?,
            "extra_invariance": serde_json::to_value(&report).map_err(|e| ExtraInvError::new_err(e.to_string()))?,
            "decomposable": serde_json::to_value(&decomposable).map_err(|e| ExtraInvError::new_err(e.to_string()))?,
        });
        to_py(py, &out)
    }

    /// Best approximation of `psi` by a space of length at most `ell`;
    /// `extra=True` restricts to `Delta`-invariant spaces.
    #[pyo3(signature = (psi, ell, extra = false))]
    fn approx<'py>(&self, py: Python<'py>, psi: Vec<Vec<Complex64>>, ell: usize, extra: bool) -> PyResult<Bound<'py, PyAny>> {
        let psi = vectors(psi);
        let res = if extra {
            best_extra_invariant(&self.setting, &psi, ell)
        } else {
            best_invariant(&self.setting, &psi, ell)
        }
        .map_err(err)?;
        let summary = to_py(py, &res.summary())?;
        let gens: Vec<Vec<Complex64>> = res.generators.iter().map(|g| g.iter().copied().collect()).collect();
        summary.set_item("generators", gens)?;
        Ok(summary)
    }

    /// `sum_j ||psi_j - P psi_j||^2` for the space generated by `generators`.
    fn evaluate(&self, psi: Vec<Vec<Complex64>>, generators: Vec<Vec<Complex64>>) -> PyResult<f64> {
        let w = self.span(generators, "gamma")?;
        evaluate_candidate(&vectors(psi), &w).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(points={}, |T|={}, fiber_dim={})",
            self.setting.points(),
            self.setting.group().order(),
            self.setting.fiber_dim()
        )
    }
}

#[pymodule]
fn extrainv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add("ExtraInvError", m.py().get_type::<ExtraInvError>())?;
    Ok(())
}
