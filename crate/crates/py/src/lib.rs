//! Python bindings. Exact values cross the boundary as strings such as
//! `"3/2"` or `"-1/2+1/2*sqrt5"`.

use kakeya::expander::{
    count_prefixes, digit_frequency, enumerate_expansions, feasible_prefix, greedy_expand, kakeya_partition,
    lazy_expand, theorem14_construct,
};
use kakeya::fibonacci;
use kakeya::{
    DigitPrefix, Error, ExpansionCertificate, Rational, Refinement, SequenceDescriptor, TargetValue, TiePolicy,
};
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use std::str::FromStr;

create_exception!(kakeya_py, KakeyaError, PyException);
create_exception!(kakeya_py, UndecidedError, KakeyaError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse(_) => PyValueError::new_err(e.to_string()),
        Error::UndecidedAtCap { .. } => UndecidedError::new_err(e.to_string()),
        _ => KakeyaError::new_err(e.to_string()),
    }
}

fn parse<T: FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

fn width(w: Option<&str>) -> PyResult<Rational> {
    w.map_or_else(|| Ok(Rational::frac(1, 1000)), parse)
}

/// A Kakeya sequence, e.g. `Sequence("fibonacci")` or `Sequence("geometric:3/5")`.
#[pyclass(name = "Sequence", module = "kakeya_py", frozen)]
struct PySequence(kakeya::Sequence);

#[pymethods]
impl PySequence {
    #[new]
    #[pyo3(signature = (descriptor, cap = None))]
    fn new(descriptor: &str, cap: Option<u32>) -> PyResult<Self> {
        let desc: SequenceDescriptor = parse(descriptor)?;
        let refinement = cap.map_or_else(Refinement::default, Refinement::with_cap);
        kakeya::Sequence::with_refinement(desc, refinement).map(PySequence).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Sequence({:?})", self.0.descriptor().to_string())
    }

    fn __len__(&self) -> PyResult<usize> {
        self.0.len().ok_or_else(|| KakeyaError::new_err("infinite sequence"))
    }

    fn term(&self, i: usize) -> PyResult<String> {
        self.0.term(i).map(|q| q.to_string()).map_err(to_py)
    }

    fn partial_sum(&self, m: usize) -> PyResult<String> {
        self.0.partial_sum(m).map(|q| q.to_string()).map_err(to_py)
    }

    /// `(lo, hi)` enclosing the tail Σ_{i>n} p_i.
    #[pyo3(signature = (n, width = None))]
    fn tail(&self, n: usize, width: Option<&str>) -> PyResult<(String, String)> {
        let iv = self.0.tail_enclosure(n, &self::width(width)?).map_err(to_py)?;
        Ok((iv.lo().to_string(), iv.hi().to_string()))
    }

    /// `[(index, verdict)]` for `p_n < T_n` (strict) or `p_n <= T_n`.
    #[pyo3(signature = (n, strict = false, width = None))]
    fn kakeya_check(&self, n: usize, strict: bool, width: Option<&str>) -> PyResult<Vec<(usize, String)>> {
        let rep = self.0.kakeya_check(n, strict, &self::width(width)?).map_err(to_py)?;
        Ok(rep.entries.iter().map(|e| (e.index, e.verdict.to_string())).collect())
    }

    #[pyo3(signature = (n, width = None))]
    fn special_indices(&self, n: usize, width: Option<&str>) -> PyResult<Vec<usize>> {
        self.0.special_indices(n, &self::width(width)?).map(|(s, _)| s).map_err(to_py)
    }
}

/// Digits, exact partial sum and residual enclosure of an expansion.
#[pyclass(name = "Certificate", module = "kakeya_py", frozen, get_all)]
struct PyCertificate {
    bits: String,
    partial: String,
    residual: (String, String),
    feasible: String,
    text: String,
}

impl From<ExpansionCertificate> for PyCertificate {
    fn from(c: ExpansionCertificate) -> Self {
        PyCertificate {
            bits: c.prefix.to_string(),
            partial: c.partial.to_string(),
            residual: (c.residual.lo().to_string(), c.residual.hi().to_string()),
            feasible: c.feasible.to_string(),
            text: c.to_text(),
        }
    }
}

#[pymethods]
impl PyCertificate {
    fn __repr__(&self) -> String {
        format!("Certificate(bits={:?}, feasible={:?})", self.bits, self.feasible)
    }
}

#[pyfunction]
fn fib(n: usize) -> BigUint {
    fibonacci::fib(n)
}

#[pyfunction]
fn cassini(n: usize) -> PyResult<bool> {
    fibonacci::cassini_check(n).map_err(to_py)
}

#[pyfunction]
fn binet(n: usize) -> PyResult<bool> {
    fibonacci::binet_nearest_check(n).map(|b| b.holds()).map_err(to_py)
}

/// `(holds, equality)` for `F_{n+1} <= 2 F_n`.
#[pyfunction]
fn doubling(n: usize) -> PyResult<(bool, bool)> {
    fibonacci::lemma31_check(n).map(|d| (d.holds, d.equality)).map_err(to_py)
}

/// `(lo, hi)` enclosing Σ 1/F_i.
#[pyfunction]
#[pyo3(signature = (width = None))]
fn s_constant(width: Option<&str>) -> PyResult<(String, String)> {
    let iv = fibonacci::s_constant(&self::width(width)?).map_err(to_py)?;
    Ok((iv.lo().to_string(), iv.hi().to_string()))
}

/// Greedy (`rule="greedy"`) or lazy (`rule="lazy"`) digits.
#[pyfunction]
#[pyo3(signature = (seq, rule, target, digits, width = None))]
fn expand(seq: &PySequence, rule: &str, target: &str, digits: usize, width: Option<&str>) -> PyResult<PyCertificate> {
    let x: TargetValue = parse(target)?;
    let w = self::width(width)?;
    let cert = match rule {
        "greedy" => greedy_expand(&seq.0, &x, digits, &w),
        "lazy" => lazy_expand(&seq.0, &x, digits, &w),
        other => return Err(PyValueError::new_err(format!("unknown rule {other:?}"))),
    };
    cert.map(PyCertificate::from).map_err(to_py)
}

/// `(bits, complement)`; `tie` is `"target"` or `"complement"`.
#[pyfunction]
#[pyo3(signature = (seq, target, digits, tie = "target", width = None))]
fn partition(seq: &PySequence, target: &str, digits: usize, tie: &str, width: Option<&str>) -> PyResult<(String, String)> {
    let tie = match tie {
        "target" => TiePolicy::PreferTarget,
        "complement" => TiePolicy::PreferComplement,
        other => return Err(PyValueError::new_err(format!("unknown tie policy {other:?}"))),
    };
    let (bins, comp) = kakeya_partition(&seq.0, &parse(target)?, digits, tie, &self::width(width)?).map_err(to_py)?;
    Ok((bins.to_string(), comp.to_string()))
}

/// `"FEASIBLE"`, `"INFEASIBLE"` or `"UNDECIDED"`.
#[pyfunction]
#[pyo3(signature = (seq, target, bits, width = None))]
fn feasible(seq: &PySequence, target: &str, bits: &str, width: Option<&str>) -> PyResult<String> {
    let prefix: DigitPrefix = parse(bits)?;
    feasible_prefix(&seq.0, &parse(target)?, &prefix, &self::width(width)?)
        .map(|f| f.to_string())
        .map_err(to_py)
}

/// Feasible prefix counts for each length `0..=depth`.
#[pyfunction]
#[pyo3(signature = (seq, target, depth, width = None))]
fn count(seq: &PySequence, target: &str, depth: usize, width: Option<&str>) -> PyResult<Vec<u64>> {
    count_prefixes(&seq.0, &parse(target)?, depth, &self::width(width)?)
        .map(|c| c.feasible)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (seq, target, count, depth, width = None))]
fn enumerate(seq: &PySequence, target: &str, count: usize, depth: usize, width: Option<&str>) -> PyResult<Vec<String>> {
    let certs = enumerate_expansions(&seq.0, &parse(target)?, count, depth, &self::width(width)?).map_err(to_py)?;
    Ok(certs.iter().map(|c| c.prefix.to_string()).collect())
}

/// `(special indices, certification depth)`.
#[pyfunction]
#[pyo3(signature = (seq, target, m, window = 200, width = None))]
fn branch_plan(
    seq: &PySequence,
    target: &str,
    m: usize,
    window: usize,
    width: Option<&str>,
) -> PyResult<(Vec<usize>, usize)> {
    let plan = theorem14_construct(&seq.0, &parse(target)?, m, &self::width(width)?, window).map_err(to_py)?;
    Ok((plan.special, plan.depth))
}

/// `(ones, zeros, ratio)`.
#[pyfunction]
fn frequency(bits: &str) -> PyResult<(usize, usize, String)> {
    let f = digit_frequency(&parse(bits)?).map_err(to_py)?;
    Ok((f.ones, f.zeros, f.ratio.to_string()))
}

#[pymodule]
fn kakeya_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("KakeyaError", py.get_type::<KakeyaError>())?;
    m.add("UndecidedError", py.get_type::<UndecidedError>())?;
    m.add_class::<PySequence>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(fib, m)?)?;
    m.add_function(wrap_pyfunction!(cassini, m)?)?;
    m.add_function(wrap_pyfunction!(binet, m)?)?;
    m.add_function(wrap_pyfunction!(doubling, m)?)?;
    m.add_function(wrap_pyfunction!(s_constant, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(feasible, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(branch_plan, m)?)?;
    m.add_function(wrap_pyfunction!(frequency, m)?)?;
    Ok(())
}
