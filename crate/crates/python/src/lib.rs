//! Python bindings for the wreath-stats library.
//!
//! Exposes colored permutations, conjugacy-class labels, statistics, and the
//! exact moment/generating-function machinery. Rationals cross the boundary
//! as `fractions.Fraction`, big integers as `int`.

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wreath_stats::classes;
use wreath_stats::genfunc;
use wreath_stats::moments;
use wreath_stats::statistics::{self, Builtin, Pcp};
use wreath_stats::{CltReport, CltSource, ColoredPermutation, RPartition, Statistic};

fn err(e: wreath_stats::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn budget_or_default(budget: Option<u128>) -> u128 {
    budget.unwrap_or(wreath_stats::DEFAULT_BUDGET)
}

/// An element (ω, τ) of the colored permutation group S_{n,r}.
#[pyclass(name = "ColoredPermutation", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyColoredPermutation {
    inner: ColoredPermutation,
}

#[pymethods]
impl PyColoredPermutation {
    #[staticmethod]
    fn identity(n: usize, r: u32) -> Self {
        PyColoredPermutation {
            inner: ColoredPermutation::identity(n, r),
        }
    }

    /// Parse one-line notation: "4^1 5^3 1^3 3^1 2^0" or signed "2,-1" (r=2).
    #[staticmethod]
    fn parse(text: &str, r: u32) -> PyResult<Self> {
        Ok(PyColoredPermutation {
            inner: ColoredPermutation::parse(text, r).map_err(err)?,
        })
    }

    /// Build a B_n element from its signed one-line word.
    #[staticmethod]
    fn from_signed(word: Vec<i64>) -> PyResult<Self> {
        Ok(PyColoredPermutation {
            inner: ColoredPermutation::from_signed(&word).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn r(&self) -> u32 {
        self.inner.num_colors()
    }

    /// ω(i) for 1-based i.
    fn apply(&self, i: usize) -> PyResult<usize> {
        if i < 1 || i > self.inner.degree() {
            return Err(PyValueError::new_err(format!("element {i} out of range")));
        }
        Ok(self.inner.apply(i))
    }

    /// τ(v) for 1-based value v.
    fn color_of_value(&self, v: usize) -> PyResult<u32> {
        if v < 1 || v > self.inner.degree() {
            return Err(PyValueError::new_err(format!("value {v} out of range")));
        }
        Ok(self.inner.color_of_value(v))
    }

    /// f(i^c) = ω(i)^{τ(ω(i)) + c} as a (value, color) pair.
    fn as_function(&self, i: usize, c: u32) -> PyResult<(usize, u32)> {
        self.inner.as_function(i, c).map_err(err)
    }

    /// self ∘ other (other applied first).
    fn compose(&self, other: &Self) -> PyResult<Self> {
        Ok(PyColoredPermutation {
            inner: self.inner.compose(&other.inner).map_err(err)?,
        })
    }

    fn inverse(&self) -> Self {
        PyColoredPermutation {
            inner: self.inner.inverse(),
        }
    }

    /// g · self · g⁻¹.
    fn conjugate_by(&self, g: &Self) -> PyResult<Self> {
        Ok(PyColoredPermutation {
            inner: self.inner.conjugate_by(&g.inner).map_err(err)?,
        })
    }

    /// Cycles as (entries, cycle_color) with entries = [(element, color)].
    fn cycles(&self) -> Vec<(Vec<(usize, u32)>, u32)> {
        self.inner
            .cycle_decomposition()
            .into_iter()
            .map(|c| (c.entries().to_vec(), c.color()))
            .collect()
    }

    fn cycle_type(&self) -> PyRPartition {
        PyRPartition {
            inner: self.inner.cycle_type(),
        }
    }

    /// Signed one-line word (r = 2 only).
    fn signed_word(&self) -> PyResult<Vec<i64>> {
        self.inner.signed_word().map_err(err)
    }

    fn des_b(&self) -> PyResult<i64> {
        statistics::eval_des_b(&self.inner).map_err(err)
    }

    fn inv(&self) -> PyResult<i64> {
        statistics::eval_inv(&self.inner).map_err(err)
    }

    fn neg(&self) -> PyResult<i64> {
        statistics::eval_neg(&self.inner).map_err(err)
    }

    fn inv_b(&self) -> PyResult<i64> {
        statistics::eval_inv_b(&self.inner).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "ColoredPermutation('{}', r={})",
            self.inner,
            self.inner.num_colors()
        )
    }
}

/// A conjugacy-class label: an r-tuple of partitions.
#[pyclass(name = "RPartition", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyRPartition {
    inner: RPartition,
}

#[pymethods]
impl PyRPartition {
    /// Parse the label grammar, e.g. "3,1;2" for ((3,1),(2)).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyRPartition {
            inner: RPartition::parse(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_parts(parts: Vec<Vec<usize>>) -> PyResult<Self> {
        let r = parts.len() as u32;
        Ok(PyRPartition {
            inner: RPartition::new(r, parts).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn r(&self) -> u32 {
        self.inner.r()
    }

    fn parts(&self) -> Vec<Vec<usize>> {
        self.inner.components().to_vec()
    }

    fn centralizer_order(&self) -> BigInt {
        self.inner.centralizer_order()
    }

    fn class_size(&self) -> BigInt {
        self.inner.class_size()
    }

    /// Smallest cycle length, or None for the empty label.
    fn min_cycle_length(&self) -> Option<usize> {
        self.inner.min_cycle_length()
    }

    fn has_no_cycles_up_to(&self, m: usize) -> bool {
        self.inner.has_no_cycles_up_to(m)
    }

    /// Δ^k(λ,μ) = m_1(λ)^k − m_1(μ)^k (bipartitions only).
    fn delta(&self, k: u32) -> PyResult<i64> {
        self.inner.delta(k).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RPartition('{}')", self.inner)
    }
}

/// A statistic as a rational combination of indicator functions, with native
/// evaluators for the built-ins.
#[pyclass(name = "Statistic", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyStatistic {
    inner: Statistic,
}

#[pymethods]
impl PyStatistic {
    #[staticmethod]
    fn des_b(n: usize) -> Self {
        PyStatistic {
            inner: Statistic::des_b(n),
        }
    }

    #[staticmethod]
    fn inv(n: usize) -> Self {
        PyStatistic {
            inner: Statistic::inv(n),
        }
    }

    #[staticmethod]
    fn neg(n: usize) -> Self {
        PyStatistic {
            inner: Statistic::neg(n),
        }
    }

    #[staticmethod]
    fn inv_b(n: usize) -> Self {
        PyStatistic {
            inner: Statistic::inv_b(n),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyStatistic {
            inner: Statistic::from_json(text).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn r(&self) -> u32 {
        self.inner.r()
    }

    fn degree_bound(&self) -> usize {
        self.inner.degree_bound()
    }

    fn num_terms(&self) -> usize {
        self.inner.num_terms()
    }

    fn evaluate(&self, p: &PyColoredPermutation) -> PyResult<BigRational> {
        self.inner.evaluate(&p.inner).map_err(err)
    }

    fn multiply(&self, other: &Self) -> PyResult<Self> {
        Ok(PyStatistic {
            inner: self.inner.multiply(&other.inner).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Statistic(n={}, r={}, terms={})",
            self.inner.n(),
            self.inner.r(),
            self.inner.num_terms()
        )
    }
}

/// All conjugacy-class labels of S_{n,r} in canonical order.
#[pyfunction]
fn enumerate_classes(n: usize, r: u32) -> PyResult<Vec<PyRPartition>> {
    if r < 1 {
        return Err(PyValueError::new_err("r must be positive"));
    }
    Ok(classes::enumerate_r_partitions(n, r)
        .into_iter()
        .map(|inner| PyRPartition { inner })
        .collect())
}

/// Every element of the class (budget-limited enumeration).
#[pyfunction]
#[pyo3(signature = (label, budget=None))]
fn class_elements(
    label: &PyRPartition,
    budget: Option<u128>,
) -> PyResult<Vec<PyColoredPermutation>> {
    Ok(classes::class_elements(&label.inner, budget_or_default(budget))
        .map_err(err)?
        .into_iter()
        .map(|inner| PyColoredPermutation { inner })
        .collect())
}

/// Exactly uniform class sample, deterministic in the seed.
#[pyfunction]
fn sample_uniform(label: &PyRPartition, seed: u64) -> PyColoredPermutation {
    PyColoredPermutation {
        inner: classes::sample_uniform(&label.inner, seed),
    }
}

#[pyfunction]
fn group_order(n: usize, r: u32) -> BigInt {
    wreath_stats::arith::group_order(n, r)
}

#[pyfunction]
fn mean_des_b(label: &PyRPartition) -> PyResult<BigRational> {
    moments::mean_des_b(&label.inner).map_err(err)
}

#[pyfunction]
fn mean_neg(label: &PyRPartition) -> PyResult<BigRational> {
    moments::mean_neg(&label.inner).map_err(err)
}

#[pyfunction]
fn mean_inv(label: &PyRPartition) -> PyResult<BigRational> {
    moments::mean_inv(&label.inner).map_err(err)
}

#[pyfunction]
fn mean_inv_b(label: &PyRPartition) -> PyResult<BigRational> {
    moments::mean_inv_b(&label.inner).map_err(err)
}

/// First moment over all of B_n of a built-in statistic.
#[pyfunction]
fn whole_group_mean(name: &str, n: usize) -> PyResult<BigRational> {
    let builtin = Builtin::from_name(name).map_err(err)?;
    Ok(moments::whole_group_mean(builtin, n))
}

/// Exact k-th moment over the class, by enumeration.
#[pyfunction]
#[pyo3(signature = (stat, label, k=1, budget=None))]
fn brute_moment(
    stat: &PyStatistic,
    label: &PyRPartition,
    k: u32,
    budget: Option<u128>,
) -> PyResult<BigRational> {
    Ok(
        moments::brute_moment(&stat.inner, &label.inner, k, budget_or_default(budget))
            .map_err(err)?
            .value,
    )
}

/// Class-independent k-th moment, valid on classes without cycles ≤ m·k.
#[pyfunction]
#[pyo3(signature = (stat, k=1))]
fn formula_moment(stat: &PyStatistic, k: u32) -> PyResult<BigRational> {
    moments::kth_moment_no_short_cycles(&stat.inner, k).map_err(err)
}

/// Pr[(ω,τ) satisfies the constraints] on a class without short cycles.
#[pyfunction]
fn indicator_probability(
    label: &PyRPartition,
    constraints: Vec<(usize, usize, u32)>,
) -> PyResult<BigRational> {
    let pcp = Pcp::new(label.inner.n(), label.inner.r(), constraints).map_err(err)?;
    moments::indicator_probability(&pcp, &label.inner).map_err(err)
}

/// Coefficients of B_n(t), index = power of t.
#[pyfunction]
fn group_descent_poly(n: usize) -> Vec<BigRational> {
    genfunc::group_descent_poly(n).coeffs().to_vec()
}

/// Coefficients of B_{λ,μ}(t), index = power of t.
#[pyfunction]
fn class_descent_poly(label: &PyRPartition) -> PyResult<Vec<BigRational>> {
    Ok(genfunc::class_descent_poly(&label.inner)
        .map_err(err)?
        .coeffs()
        .to_vec())
}

/// Number of class elements with d−1 descents.
#[pyfunction]
fn descent_count(label: &PyRPartition, d: usize) -> PyResult<BigInt> {
    genfunc::descent_count(&label.inner, d).map_err(err)
}

/// N(q, 2m): Möbius count of primitive necklaces.
#[pyfunction]
fn necklace_count(q: u64, m: u64) -> PyResult<BigInt> {
    genfunc::necklace_count(q, m).map_err(err)
}

#[pyfunction]
fn mobius(d: u64) -> PyResult<i32> {
    if d < 1 {
        return Err(PyValueError::new_err("mobius needs d >= 1"));
    }
    Ok(genfunc::mobius(d))
}

fn clt_to_dict<'py>(py: Python<'py>, rep: &CltReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("source", rep.source.to_string())?;
    d.set_item("n", rep.n)?;
    d.set_item("mean", rep.mean.clone())?;
    d.set_item("variance", rep.variance.clone())?;
    d.set_item("skewness", rep.skewness)?;
    d.set_item("excess_kurtosis", rep.excess_kurtosis)?;
    Ok(d)
}

/// Exact mean/variance and standardized moments of des_B on B_n.
#[pyfunction]
fn clt_group(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyDict>> {
    let rep = genfunc::clt_report(&CltSource::WholeGroup { n }).map_err(err)?;
    clt_to_dict(py, &rep)
}

/// Exact mean/variance and standardized moments of des_B on a class.
#[pyfunction]
fn clt_class<'py>(py: Python<'py>, label: &PyRPartition) -> PyResult<Bound<'py, PyDict>> {
    let rep = genfunc::clt_report(&CltSource::Class {
        label: label.inner.clone(),
    })
    .map_err(err)?;
    clt_to_dict(py, &rep)
}

/// Does the statistic lie in the span of indicators of size ≤ m?
#[pyfunction]
#[pyo3(signature = (stat, m, budget=None))]
fn in_degree_span(stat: &PyStatistic, m: usize, budget: Option<u128>) -> PyResult<bool> {
    Ok(
        statistics::in_degree_span(&stat.inner, m, budget_or_default(budget))
            .map_err(err)?
            .is_in_span(),
    )
}

/// Moment polynomial in n of the order-invariant extension of a set of
/// same-size constraints living at degree n0; returns coefficients, index =
/// power of n.
#[pyfunction]
#[pyo3(signature = (pcps, n0, r, k=1))]
fn oie_polynomial(
    pcps: Vec<Vec<(usize, usize, u32)>>,
    n0: usize,
    r: u32,
    k: u32,
) -> PyResult<Vec<BigRational>> {
    let mut set = std::collections::BTreeSet::new();
    for triples in pcps {
        set.insert(Pcp::new(n0, r, triples).map_err(err)?);
    }
    Ok(moments::oie_polynomial(&set, k)
        .map_err(err)?
        .coeffs()
        .to_vec())
}

#[pymodule]
fn wreath_stats_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyColoredPermutation>()?;
    m.add_class::<PyRPartition>()?;
    m.add_class::<PyStatistic>()?;
    m.add_function(wrap_pyfunction!(enumerate_classes, m)?)?;
    m.add_function(wrap_pyfunction!(class_elements, m)?)?;
    m.add_function(wrap_pyfunction!(sample_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(group_order, m)?)?;
    m.add_function(wrap_pyfunction!(mean_des_b, m)?)?;
    m.add_function(wrap_pyfunction!(mean_neg, m)?)?;
    m.add_function(wrap_pyfunction!(mean_inv, m)?)?;
    m.add_function(wrap_pyfunction!(mean_inv_b, m)?)?;
    m.add_function(wrap_pyfunction!(whole_group_mean, m)?)?;
    m.add_function(wrap_pyfunction!(brute_moment, m)?)?;
    m.add_function(wrap_pyfunction!(formula_moment, m)?)?;
    m.add_function(wrap_pyfunction!(indicator_probability, m)?)?;
    m.add_function(wrap_pyfunction!(group_descent_poly, m)?)?;
    m.add_function(wrap_pyfunction!(class_descent_poly, m)?)?;
    m.add_function(wrap_pyfunction!(descent_count, m)?)?;
    m.add_function(wrap_pyfunction!(necklace_count, m)?)?;
    m.add_function(wrap_pyfunction!(mobius, m)?)?;
    m.add_function(wrap_pyfunction!(clt_group, m)?)?;
    m.add_function(wrap_pyfunction!(clt_class, m)?)?;
    m.add_function(wrap_pyfunction!(in_degree_span, m)?)?;
    m.add_function(wrap_pyfunction!(oie_polynomial, m)?)?;
    Ok(())
}
