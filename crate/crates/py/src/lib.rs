//! Python bindings. Rationals cross the boundary as `"n/d"` strings, which
//! `fractions.Fraction` parses directly.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pfa_reduce::amplify::{amplify_f, amplify_nc, go_input_builder};
use pfa_reduce::binaut::b_matrix;
use pfa_reduce::cl2cm::{CheckerParams, EqualityChecker};
use pfa_reduce::exact::{format_rational, parse_rational, Rational};
use pfa_reduce::golden::printed_matrix_checks;
use pfa_reduce::intmat::{claus9_pipeline, hirvensalo_pipeline, ClausOptions};
use pfa_reduce::pcp::{antizero, BinPcp};
use pfa_reduce::pcp2pfa::{
    code_binary, eleven_state_rmpcp, eliminate_output_vector, equality_pfa_11, equality_pfa_13,
    nine_state_pfa, rmpcp_compile, strict13, strict15, GadgetParams,
};
use pfa_reduce::pfa::{bounded_search, Pfa, Want};
use pfa_reduce::tm2mpcp::{tm_to_mpcp, MpcpOptions, TuringMachine};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(err)
}

#[pyclass(name = "Pfa", module = "pfa_reduce_py", frozen)]
struct PyPfa {
    inner: Pfa,
}

#[pymethods]
impl PyPfa {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyPfa {
            inner: serde_json::from_str(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }

    #[getter]
    fn states(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        self.inner.alphabet().to_vec()
    }

    #[getter]
    fn cutpoint(&self) -> String {
        format_rational(self.inner.cutpoint())
    }

    /// Exact acceptance probability of a word given as a list of symbols.
    fn accept_prob(&self, word: Vec<String>) -> PyResult<String> {
        Ok(format_rational(&self.inner.accept_prob(&word).map_err(err)?))
    }

    fn accepts(&self, word: Vec<String>) -> PyResult<bool> {
        self.inner.accepts(&word).map_err(err)
    }

    /// First word of length `<= max_len` clearing `threshold` (default: the
    /// automaton's own cutpoint and mode), with its probability.
    #[pyo3(signature = (max_len, threshold=None))]
    fn search(&self, max_len: usize, threshold: Option<&str>) -> PyResult<Option<(Vec<String>, String)>> {
        let want = match threshold {
            Some(t) => Want::Above(rational(t)?),
            None => Want::from_pfa(&self.inner),
        };
        let rep = bounded_search(&self.inner, max_len, &want);
        Ok(rep.witness.map(|w| (w.word, format_rational(&w.probability))))
    }

    fn __repr__(&self) -> String {
        format!(
            "Pfa(states={}, symbols={}, cutpoint={})",
            self.inner.dim(),
            self.inner.alphabet().len(),
            format_rational(self.inner.cutpoint())
        )
    }
}

#[pyclass(name = "Pcp", module = "pfa_reduce_py", frozen)]
struct PyPcp {
    inner: BinPcp,
}

#[pymethods]
impl PyPcp {
    /// Pairs of bit strings; `variant` is one of plain, mpcp, rmpcp, 2mpcp.
    #[new]
    #[pyo3(signature = (pairs, variant="plain"))]
    fn new(pairs: Vec<(String, String)>, variant: &str) -> PyResult<Self> {
        let doc = serde_json::json!({ "variant": variant, "pairs": pairs });
        Ok(PyPcp {
            inner: serde_json::from_value(doc).map_err(err)?,
        })
    }

    #[staticmethod]
    fn classic() -> Self {
        PyPcp {
            inner: BinPcp::classic(),
        }
    }

    fn antizero(&self) -> Self {
        PyPcp {
            inner: antizero(&self.inner),
        }
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    /// Shortest solution as 1-based pair indices.
    fn solve(&self, max_len: usize) -> Option<Vec<usize>> {
        self.inner.brute_solve(max_len).map(|s| s.one_based())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }
}

/// Compile a PCP instance with one of eq13, eq11, strict15, strict13,
/// rmpcp12, nine9, out18, minf11, bin2.
#[pyfunction]
fn pcp2pfa(inst: &PyPcp, construction: &str) -> PyResult<PyPfa> {
    let i = &inst.inner;
    let p = match construction {
        "eq13" => equality_pfa_13(i),
        "eq11" => equality_pfa_11(i),
        "strict15" => strict15(i, &GadgetParams::separating(i)),
        "strict13" => strict13(i, &GadgetParams::separating(i)),
        "rmpcp12" => rmpcp_compile(i, &GadgetParams::separating_rmpcp(i)),
        "nine9" => nine_state_pfa(i),
        "out18" => nine_state_pfa(i).and_then(|p| eliminate_output_vector(&p)),
        "minf11" => eleven_state_rmpcp(i),
        "bin2" => equality_pfa_13(i).and_then(|p| code_binary(&p)),
        other => return Err(err(format!("unknown construction {other:?}"))),
    }
    .map_err(err)?;
    Ok(PyPfa { inner: p })
}

/// Integer-matrix route: claus9, claus9-weak or hirvensalo20.
#[pyfunction]
#[pyo3(signature = (inst, route="claus9"))]
fn int2pfa(inst: &PyPcp, route: &str) -> PyResult<PyPfa> {
    let p = match route {
        "claus9" => claus9_pipeline(&inst.inner, ClausOptions::default()),
        "claus9-weak" => claus9_pipeline(
            &inst.inner,
            ClausOptions {
                merge_last: true,
                weak: true,
            },
        ),
        "hirvensalo20" => hirvensalo_pipeline(&inst.inner).map(|(p, _)| p),
        other => return Err(err(format!("unknown route {other:?}"))),
    }
    .map_err(err)?;
    Ok(PyPfa { inner: p.pfa })
}

#[pyfunction]
#[pyo3(signature = (g=12, k=10))]
fn equality_checker(g: u32, k: u32) -> PyResult<PyPfa> {
    let ec = EqualityChecker::new(CheckerParams { g, k }).map_err(err)?;
    Ok(PyPfa { inner: ec.pfa })
}

/// Amplify a base automaton; `variant` is "f" or "nc".
#[pyfunction]
#[pyo3(signature = (base, variant="f"))]
fn amplify(base: &PyPfa, variant: &str) -> PyResult<PyPfa> {
    let p = match variant {
        "f" => amplify_f(&base.inner),
        "nc" => amplify_nc(&base.inner),
        other => return Err(err(format!("unknown variant {other:?}"))),
    }
    .map_err(err)?;
    Ok(PyPfa { inner: p })
}

/// `(n, t)` of the GO recipe for acceptance `x` and error `eps`.
#[pyfunction]
fn go_plan(x: &str, eps: &str) -> PyResult<(u64, u64)> {
    let plan = go_input_builder(&rational(x)?, &rational(eps)?).map_err(err)?;
    Ok((plan.n, plan.t))
}

/// The 2×2 binary automaton of a bit string, entries as strings.
#[pyfunction]
fn binary_automaton(bits: &str) -> PyResult<Vec<Vec<String>>> {
    let u = bits.parse().map_err(err)?;
    Ok(b_matrix(&u)
        .to_rows()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect())
}

/// MPCP instance (as JSON) for a machine given as JSON and a tape.
#[pyfunction]
#[pyo3(signature = (machine_json, tape=Vec::new()))]
fn tm2mpcp(machine_json: &str, tape: Vec<String>) -> PyResult<String> {
    let tm: TuringMachine = serde_json::from_str(machine_json).map_err(err)?;
    let m = tm_to_mpcp(&tm, &tape, MpcpOptions::default()).map_err(err)?;
    serde_json::to_string(&m).map_err(err)
}

/// `(name, matches)` for each regenerated printed matrix.
#[pyfunction]
fn verify_printed_matrices() -> Vec<(String, bool)> {
    printed_matrix_checks()
        .into_iter()
        .map(|(name, shown, made)| (name.to_string(), shown == made))
        .collect()
}

#[pymodule]
fn pfa_reduce_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPfa>()?;
    m.add_class::<PyPcp>()?;
    m.add_function(wrap_pyfunction!(pcp2pfa, m)?)?;
    m.add_function(wrap_pyfunction!(int2pfa, m)?)?;
    m.add_function(wrap_pyfunction!(equality_checker, m)?)?;
    m.add_function(wrap_pyfunction!(amplify, m)?)?;
    m.add_function(wrap_pyfunction!(go_plan, m)?)?;
    m.add_function(wrap_pyfunction!(binary_automaton, m)?)?;
    m.add_function(wrap_pyfunction!(tm2mpcp, m)?)?;
    m.add_function(wrap_pyfunction!(verify_printed_matrices, m)?)?;
    Ok(())
}
