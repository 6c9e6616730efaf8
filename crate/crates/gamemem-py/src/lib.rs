//! Python bindings. Objects are built from the text formats and converted
//! back with `to_text`; colors and states cross the boundary by name.

use gamemem::strategy::{play_of, product_arena, Strategy as _};
use gamemem::{io, GameError};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: GameError) -> PyErr {
    match e {
        GameError::BudgetExceeded(_) | GameError::SearchExhausted(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn load(path: &str) -> PyResult<String> {
    std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(format!("{path}: {e}")))
}

#[pyclass(name = "Arena", module = "gamemem_py", from_py_object)]
#[derive(Clone)]
pub struct PyArena(gamemem::Arena);

#[pymethods]
impl PyArena {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_arena(text).map(PyArena).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Self::parse(&load(path)?)
    }

    fn to_text(&self) -> String {
        io::print_arena(&self.0)
    }

    fn to_dot(&self) -> String {
        io::arena_dot(&self.0, &[])
    }

    #[getter]
    fn n_states(&self) -> usize {
        self.0.n_states()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.0.n_edges()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.0.names().to_vec()
    }

    #[getter]
    fn colors(&self) -> Vec<String> {
        self.0.colors().to_vec()
    }

    /// Product with `skel`; only pairs reachable from S × {m_init} unless `full`.
    #[pyo3(signature = (skel, full = false))]
    fn product(&self, skel: &PySkeleton, full: bool) -> PyResult<PyArena> {
        let p = if full { product_arena(&self.0, &skel.0) } else { gamemem::product_reachable(&self.0, &skel.0) };
        p.map(|p| PyArena(p.arena)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Arena({} states, {} edges)", self.0.n_states(), self.0.n_edges())
    }
}

impl PyArena {
    fn indices(&self, names: &[String]) -> PyResult<Vec<usize>> {
        names
            .iter()
            .map(|n| self.0.state_index(n).ok_or_else(|| PyValueError::new_err(format!("unknown state `{n}`"))))
            .collect()
    }
}

#[pyclass(name = "Skeleton", module = "gamemem_py", from_py_object)]
#[derive(Clone)]
pub struct PySkeleton(gamemem::MemorySkeleton);

#[pymethods]
impl PySkeleton {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_skeleton(text).map(PySkeleton).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Self::parse(&load(path)?)
    }

    #[staticmethod]
    fn trivial(colors: Vec<String>) -> Self {
        PySkeleton(gamemem::MemorySkeleton::trivial(colors))
    }

    fn to_text(&self) -> String {
        io::print_skeleton(&self.0)
    }

    fn to_dot(&self) -> String {
        io::skeleton_dot(&self.0)
    }

    #[getter]
    fn n_states(&self) -> usize {
        self.0.n_states()
    }

    #[getter]
    fn init(&self) -> String {
        self.0.name(self.0.init()).to_string()
    }

    fn product(&self, other: &PySkeleton) -> PyResult<PySkeleton> {
        self.0.product(&other.0).map(PySkeleton).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Skeleton({} states)", self.0.n_states())
    }
}

#[pyclass(name = "Relation", module = "gamemem_py", from_py_object)]
#[derive(Clone)]
pub struct PyRelation(gamemem::Relation);

#[pymethods]
impl PyRelation {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_relation(text).map(PyRelation).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Self::parse(&load(path)?)
    }

    fn to_text(&self) -> String {
        io::print_relation(&self.0)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().name()
    }

    fn inverse(&self) -> PyRelation {
        PyRelation(self.0.inverse())
    }

    /// -1, 0 or 1 comparing the lassos `u1 v1^ω` and `u2 v2^ω`, given as color names.
    fn compare(&self, u1: Vec<String>, v1: Vec<String>, u2: Vec<String>, v2: Vec<String>) -> PyResult<i8> {
        let (a, b) = (self.lasso(&u1, &v1)?, self.lasso(&u2, &v2)?);
        Ok(self.0.compare(&a, &b).map_err(err)? as i8)
    }

    /// Whether `u v^ω` is winning; qualitative kinds only.
    fn wins(&self, u: Vec<String>, v: Vec<String>) -> PyResult<bool> {
        self.0.lasso_in_win(&self.lasso(&u, &v)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Relation({})", self.0.kind().name())
    }
}

impl PyRelation {
    fn lasso(&self, u: &[String], v: &[String]) -> PyResult<gamemem::ColorLasso> {
        let idx = |w: &[String]| -> PyResult<Vec<usize>> {
            w.iter()
                .map(|c| {
                    self.0.colors().iter().position(|x| x == c).ok_or_else(|| PyValueError::new_err(format!("unknown color `{c}`")))
                })
                .collect()
        };
        let v = idx(v)?;
        if v.is_empty() {
            return Err(PyValueError::new_err("the cycle must be non-empty"));
        }
        Ok(gamemem::ColorLasso::new(idx(u)?, v))
    }

    fn on(&self, a: &PyArena) -> PyResult<gamemem::Relation> {
        self.0.align_to(a.0.colors()).map_err(err)
    }
}

#[pyclass(name = "Strategy", module = "gamemem_py", from_py_object)]
#[derive(Clone)]
pub struct PyStrategy(gamemem::MealyStrategy);

#[pymethods]
impl PyStrategy {
    #[staticmethod]
    fn parse(text: &str, arena: &PyArena) -> PyResult<Self> {
        io::parse_strategy(text, &arena.0).map(PyStrategy).map_err(err)
    }

    fn to_text(&self, arena: &PyArena) -> String {
        io::print_strategy(&self.0, &arena.0)
    }

    #[getter]
    fn owner(&self) -> String {
        self.0.owner().to_string()
    }

    #[getter]
    fn memory_states(&self) -> usize {
        self.0.skeleton().n_states()
    }
}

/// (prefix-cover verdict, cyclic-cover verdict).
#[pyfunction]
fn covers(arena: &PyArena, skel: &PySkeleton, cov: Vec<String>) -> PyResult<(bool, bool)> {
    let s = arena.indices(&cov)?;
    let p = gamemem::check_prefix_cover(&arena.0, &skel.0, &s).map_err(err)?;
    let c = gamemem::check_cyclic_cover(&arena.0, &skel.0, &s).map_err(err)?;
    Ok((p.verdict, c.verdict))
}

/// Equilibrium on the base arena from the given skeletons (product-combined).
#[pyfunction]
fn solve_general(arena: &PyArena, rel: &PyRelation, skels: Vec<PySkeleton>) -> PyResult<(PyStrategy, PyStrategy)> {
    let sks: Vec<_> = skels.into_iter().map(|s| s.0).collect();
    let r = gamemem::solve_general(&arena.0, &rel.on(arena)?, &sks).map_err(err)?;
    Ok((PyStrategy(r.sigma1), PyStrategy(r.sigma2)))
}

/// Equilibrium from `cov` on an arena covered by `skel`; memoryless on the arena.
#[pyfunction]
fn solve_covered(arena: &PyArena, rel: &PyRelation, skel: &PySkeleton, cov: Vec<String>) -> PyResult<(PyStrategy, PyStrategy)> {
    let problem = gamemem::Problem::uniform(arena.0.clone(), arena.indices(&cov)?, rel.on(arena)?, skel.0.clone());
    let r = gamemem::solve_covered(&problem).map_err(err)?;
    Ok((PyStrategy(r.sigma1), PyStrategy(r.sigma2)))
}

/// Color names of the prefix and cycle of the play from `start`.
#[pyfunction]
fn play(arena: &PyArena, start: String, s1: &PyStrategy, s2: &PyStrategy) -> PyResult<(Vec<String>, Vec<String>)> {
    let s = arena.indices(&[start])?[0];
    let l = play_of(&arena.0, s, &s1.0, &s2.0).colors();
    let names = |w: &[usize]| w.iter().map(|&c| arena.0.color_name(c).to_string()).collect();
    Ok((names(l.u()), names(l.v())))
}

/// `cls` is `memoryless`, `upto:<k>` or `unbounded`.
#[pyfunction]
#[pyo3(signature = (arena, rel, s1, s2, starts, cls = "memoryless", budget = gamemem::verify::DEFAULT_BUDGET))]
fn is_ne(
    arena: &PyArena,
    rel: &PyRelation,
    s1: &PyStrategy,
    s2: &PyStrategy,
    starts: Vec<String>,
    cls: &str,
    budget: u64,
) -> PyResult<bool> {
    use gamemem::DeviationClass;
    let class = match cls.split_once(':') {
        None if cls == "memoryless" => DeviationClass::memoryless(arena.0.colors()),
        None if cls == "unbounded" => DeviationClass::Unbounded,
        Some(("upto", k)) => DeviationClass::UpTo(k.parse().map_err(|_| PyValueError::new_err(format!("bad bound `{k}`")))?),
        _ => return Err(PyValueError::new_err(format!("unknown class `{cls}`"))),
    };
    let st = arena.indices(&starts)?;
    let v = gamemem::is_ne_within(&arena.0, &rel.on(arena)?, &s1.0, &s2.0, &st, &class, budget).map_err(err)?;
    Ok(v.verdict)
}

/// (passed, complete, instances) for `monotony` or `selectivity`.
#[pyfunction]
#[pyo3(signature = (rel, skel, condition, max_states = 2, words = 3))]
fn test_condition(rel: &PyRelation, skel: &PySkeleton, condition: &str, max_states: usize, words: usize) -> PyResult<(bool, bool, u64)> {
    let budget = gamemem::ConditionBudget::new(gamemem::Family::SmallNfas { max_states }, words);
    let rep = match condition {
        "monotony" => gamemem::test_monotony(&rel.0, &skel.0, &budget),
        "selectivity" => gamemem::test_selectivity(&rel.0, &skel.0, &budget),
        _ => return Err(PyValueError::new_err(format!("unknown condition `{condition}`"))),
    }
    .map_err(err)?;
    Ok((rep.passed(), rep.coverage.complete, rep.coverage.instances))
}

/// (strategies examined, strategies beaten).
#[pyfunction]
#[pyo3(signature = (arena, rel, start, max_states = 2, max_cycle = 8))]
fn counterexample(arena: &PyArena, rel: &PyRelation, start: String, max_states: usize, max_cycle: usize) -> PyResult<(usize, usize)> {
    let s = arena.indices(&[start])?[0];
    let rep = gamemem::counterexample_harness(&arena.0, &rel.on(arena)?, s, max_states, max_cycle).map_err(err)?;
    Ok((rep.strategies, rep.beaten))
}

#[pymodule]
fn gamemem_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArena>()?;
    m.add_class::<PySkeleton>()?;
    m.add_class::<PyRelation>()?;
    m.add_class::<PyStrategy>()?;
    m.add_function(wrap_pyfunction!(covers, m)?)?;
    m.add_function(wrap_pyfunction!(solve_general, m)?)?;
    m.add_function(wrap_pyfunction!(solve_covered, m)?)?;
    m.add_function(wrap_pyfunction!(play, m)?)?;
    m.add_function(wrap_pyfunction!(is_ne, m)?)?;
    m.add_function(wrap_pyfunction!(test_condition, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample, m)?)?;
    Ok(())
}
