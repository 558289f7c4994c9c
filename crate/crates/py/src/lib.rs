//! Python bindings for the quasiconf workbench.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use quasiconf::canon::{are_isomorphic, automorphism_group_order, canonical_form};
use quasiconf::catalog::{build_catalog, catalog_entry};
use quasiconf::constructions::{delete, recipe_34_to_4, Realized};
use quasiconf::embed::{find_embeddings, EmbedMode};
use quasiconf::format::StructureFile;
use quasiconf::kernel::{join, meet};
use quasiconf::obstruction;
use quasiconf::render::{parse_viewport, render_svg, RenderOptions};
use quasiconf::{check_faithful, Error, IncidenceStructure, ProjLine, ProjMap, ProjPoint, Realization, Signature};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_map(rows: [[String; 3]; 3]) -> Result<ProjMap, Error> {
    let r = |i: usize| -> Result<_, Error> {
        Ok([
            quasiconf::kernel::parse_rational(&rows[i][0])?,
            quasiconf::kernel::parse_rational(&rows[i][1])?,
            quasiconf::kernel::parse_rational(&rows[i][2])?,
        ])
    };
    ProjMap::new([r(0)?, r(1)?, r(2)?])
}

/// Point-line incidence structure, optionally with exact coordinates.
#[pyclass(name = "Structure", module = "quasiconf", skip_from_py_object)]
#[derive(Clone)]
struct PyStructure {
    name: String,
    s: IncidenceStructure,
    r: Option<Realization>,
}

impl PyStructure {
    fn realized(&self) -> PyResult<Realized> {
        match &self.r {
            Some(r) => Ok(Realized::new(self.s.clone(), r.clone())),
            None => Err(PyValueError::new_err(format!("`{}` has no coordinates", self.name))),
        }
    }

    fn from_realized(name: String, x: Realized) -> Self {
        Self {
            name,
            s: x.structure,
            r: Some(x.realization),
        }
    }

    fn file(&self) -> PyResult<StructureFile> {
        StructureFile::from_structure(&self.name, &self.s, self.r.as_ref()).map_err(err)
    }
}

#[pymethods]
impl PyStructure {
    /// `lines` is a list of `(line_id, [point_id, ...])`.
    #[new]
    #[pyo3(signature = (points, lines, name = None))]
    fn new(points: Vec<String>, lines: Vec<(String, Vec<String>)>, name: Option<String>) -> PyResult<Self> {
        Ok(Self {
            name: name.unwrap_or_else(|| "unnamed".into()),
            s: IncidenceStructure::from_lines(points, lines).map_err(err)?,
            r: None,
        })
    }

    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        let e = catalog_entry(name).ok_or_else(|| PyValueError::new_err(format!("no catalog entry `{name}`")))?;
        Ok(Self {
            name: e.name,
            s: e.structure,
            r: e.realization,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let f = StructureFile::parse(text).map_err(err)?;
        let (s, r) = f.load_parts().map_err(err)?;
        Ok(Self { name: f.name, s, r })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| err(e.into()))?;
        Self::from_json(&text)
    }

    fn to_json(&self) -> PyResult<String> {
        Ok(self.file()?.to_json())
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.file()?.save(path).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.name.clone()
    }

    #[getter]
    fn num_points(&self) -> usize {
        self.s.num_points()
    }

    #[getter]
    fn num_lines(&self) -> usize {
        self.s.num_lines()
    }

    #[getter]
    fn incidences(&self) -> usize {
        self.s.incidence_count()
    }

    #[getter]
    fn point_ids(&self) -> Vec<String> {
        self.s.point_ids().to_vec()
    }

    #[getter]
    fn lines(&self) -> Vec<(String, Vec<String>)> {
        self.s.lines_with_ids()
    }

    #[getter]
    fn has_coordinates(&self) -> bool {
        self.r.is_some()
    }

    fn signature(&self) -> PySignature {
        PySignature(self.s.signature())
    }

    fn is_quasi_configuration(&self) -> bool {
        self.s.is_quasi_configuration()
    }

    fn is_k_configuration(&self, k: usize) -> bool {
        self.s.is_k_configuration(k)
    }

    fn is_34_configuration(&self) -> bool {
        self.s.is_34_configuration()
    }

    fn is_n34_configuration(&self) -> bool {
        self.s.is_n34_configuration()
    }

    fn is_connected(&self) -> bool {
        self.s.is_connected()
    }

    /// Coordinates of a point as strings, if present.
    fn point_coordinates(&self, id: &str) -> Option<[String; 3]> {
        self.r.as_ref()?.point(id).map(|p| p.to_strings())
    }

    /// Sets point coordinates; each line becomes the join of its first two points.
    fn set_point_coordinates(&mut self, coords: Vec<(String, [String; 3])>) -> PyResult<()> {
        let pts = coords
            .into_iter()
            .map(|(id, t)| Ok((id, ProjPoint::from_strs(&t)?)))
            .collect::<Result<Vec<_>, Error>>()
            .map_err(err)?;
        self.r = Some(Realization::from_point_coords(&self.s, pts).map_err(err)?);
        Ok(())
    }

    fn faithfulness(&self) -> PyResult<PyFaithfulness> {
        let r = self
            .r
            .as_ref()
            .ok_or_else(|| PyValueError::new_err(format!("`{}` has no coordinates", self.name)))?;
        let rep = check_faithful(&self.s, r).map_err(err)?;
        Ok(PyFaithfulness {
            faithful: rep.is_faithful(),
            summary: rep.summary(),
            missing: rep.missing,
            extra: rep.extra,
            collisions: rep.collisions.into_iter().map(|(k, a, b)| (k.to_string(), a, b)).collect(),
        })
    }

    fn dual(&self) -> Self {
        Self {
            name: format!("{}-dual", self.name),
            s: self.s.dual(),
            r: self.r.as_ref().map(|r| r.polar_dual()),
        }
    }

    /// Applies a projective map, given as three rows of rational strings.
    fn transformed(&self, matrix: [[String; 3]; 3]) -> PyResult<Self> {
        let m = parse_map(matrix).map_err(err)?;
        Ok(Self::from_realized(self.name.clone(), self.realized()?.transformed(&m)))
    }

    #[pyo3(signature = (points = Vec::new(), lines = Vec::new()))]
    fn delete(&self, points: Vec<String>, lines: Vec<String>) -> PyResult<Self> {
        let name = format!("{}-deleted", self.name);
        match &self.r {
            Some(_) => {
                let d = delete(&self.realized()?, points, lines).map_err(err)?;
                Ok(Self::from_realized(name, d.result))
            }
            None => Ok(Self {
                name,
                s: self.s.without(points, lines).map_err(err)?,
                r: None,
            }),
        }
    }

    /// Point mappings of embeddings of `pattern` into this structure.
    #[pyo3(signature = (pattern, weak = false, limit = 1))]
    fn embeddings(&self, pattern: &PyStructure, weak: bool, limit: usize) -> Vec<Vec<(String, String)>> {
        let mode = if weak { EmbedMode::Weak } else { EmbedMode::Induced };
        find_embeddings(&self.s, &pattern.s, mode, limit)
            .into_iter()
            .map(|e| e.points)
            .collect()
    }

    fn canonical_form(&self) -> String {
        canonical_form(&self.s).to_hex()
    }

    fn is_isomorphic(&self, other: &PyStructure) -> bool {
        are_isomorphic(&self.s, &other.s)
    }

    fn automorphism_group_order(&self) -> u128 {
        automorphism_group_order(&self.s)
    }

    #[pyo3(signature = (chart = 2, viewport = None))]
    fn render_svg(&self, chart: usize, viewport: Option<&str>) -> PyResult<String> {
        let x = self.realized()?;
        let opts = RenderOptions {
            chart,
            viewport: viewport.map(parse_viewport).transpose().map_err(err)?,
            ..RenderOptions::default()
        };
        render_svg(&x.structure, &x.realization, &opts).map_err(err)
    }

    /// A 4-configuration built from this geometric 3|4-configuration.
    #[pyo3(signature = (seed = 0))]
    fn three_four_to_four(&self, seed: u64) -> PyResult<Self> {
        let f = recipe_34_to_4(&self.realized()?, seed).map_err(err)?;
        Ok(Self::from_realized(format!("{}-to-4 (seed {seed})", self.name), f.result))
    }

    fn __repr__(&self) -> String {
        format!(
            "Structure({:?}, {} points, {} lines, {} incidences)",
            self.name,
            self.s.num_points(),
            self.s.num_lines(),
            self.s.incidence_count()
        )
    }
}

#[pyclass(name = "Faithfulness", module = "quasiconf", get_all)]
struct PyFaithfulness {
    faithful: bool,
    summary: String,
    missing: Vec<(String, String)>,
    extra: Vec<(String, String)>,
    collisions: Vec<(String, String, String)>,
}

/// Valence census `(P(x), L(y))`.
#[pyclass(name = "Signature", module = "quasiconf", eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PySignature(Signature);

#[pymethods]
impl PySignature {
    /// Parses `"a*x^3+b*x^4|c*y^3+d*y^4"`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self(text.parse().map_err(err)?))
    }

    #[staticmethod]
    fn three_four(a: usize, b: usize) -> Self {
        Self(Signature::three_four(a, b))
    }

    #[staticmethod]
    fn regular(n: usize, k: usize) -> Self {
        Self(Signature::regular(n, k))
    }

    #[getter]
    fn point_counts(&self) -> BTreeMap<usize, usize> {
        self.0.point_counts().clone()
    }

    #[getter]
    fn line_counts(&self) -> BTreeMap<usize, usize> {
        self.0.line_counts().clone()
    }

    #[getter]
    fn incidences(&self) -> usize {
        self.0.incidences()
    }

    /// `(lhs, satisfiable)` of the Euler-formula inequality.
    fn obstruction(&self) -> (i64, bool) {
        let v = obstruction::euler_obstruction(&self.0);
        (v.lhs_value, v.satisfiable)
    }

    fn dual(&self) -> Self {
        Self(self.0.dual())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Signature({:?})", self.0.to_string())
    }
}

#[pyfunction]
fn b_min(a: u64) -> u64 {
    obstruction::b_min(a)
}

#[pyfunction]
fn max_incidences(n: u64) -> u64 {
    obstruction::max_incidences(n)
}

/// `(infeasible, reason)`.
#[pyfunction]
fn infeasible_small_n34(n: u64) -> (bool, String) {
    let v = obstruction::infeasible_small_n34(n);
    (v.infeasible, v.reason)
}

#[pyfunction]
#[pyo3(signature = (signature, connected_only = false))]
fn enumerate(signature: &PySignature, connected_only: bool) -> PyResult<Vec<PyStructure>> {
    let found = quasiconf::enumerate::enumerate(&signature.0, connected_only).map_err(err)?;
    Ok(found
        .into_iter()
        .enumerate()
        .map(|(k, s)| PyStructure {
            name: format!("enum_{:04}", k + 1),
            s,
            r: None,
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (signature, connected_only = false))]
fn count(signature: &PySignature, connected_only: bool) -> PyResult<usize> {
    quasiconf::enumerate::count(&signature.0, connected_only).map_err(err)
}

#[pyfunction]
fn catalog_names() -> Vec<String> {
    build_catalog().into_iter().map(|e| e.name).collect()
}

/// Line through two points, as canonical integer strings.
#[pyfunction]
fn join_points(p: [String; 3], q: [String; 3]) -> PyResult<[String; 3]> {
    let (p, q) = (ProjPoint::from_strs(&p).map_err(err)?, ProjPoint::from_strs(&q).map_err(err)?);
    Ok(join(&p, &q).map_err(err)?.to_strings())
}

/// Intersection point of two lines.
#[pyfunction]
fn meet_lines(l: [String; 3], m: [String; 3]) -> PyResult<[String; 3]> {
    let (l, m) = (ProjLine::from_strs(&l).map_err(err)?, ProjLine::from_strs(&m).map_err(err)?);
    Ok(meet(&l, &m).map_err(err)?.to_strings())
}

#[pymodule]
#[pyo3(name = "quasiconf")]
fn quasiconf_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStructure>()?;
    m.add_class::<PySignature>()?;
    m.add_class::<PyFaithfulness>()?;
    m.add_function(wrap_pyfunction!(b_min, m)?)?;
    m.add_function(wrap_pyfunction!(max_incidences, m)?)?;
    m.add_function(wrap_pyfunction!(infeasible_small_n34, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(join_points, m)?)?;
    m.add_function(wrap_pyfunction!(meet_lines, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_rows_parse_exactly() {
        let rows = [["1", "1/2", "0"], ["0", "1", "0"], ["0", "0", "2"]].map(|r| r.map(String::from));
        let m = parse_map(rows).unwrap();
        let p = m.apply(&ProjPoint::from_ints(0, 2, 1).unwrap());
        assert_eq!(p, ProjPoint::from_ints(1, 2, 2).unwrap());
        let singular = [["1", "2", "3"], ["2", "4", "6"], ["0", "0", "1"]].map(|r| r.map(String::from));
        assert!(parse_map(singular).is_err());
    }

    #[test]
    fn catalog_wrapper_keeps_coordinates() {
        let s = PyStructure::catalog("13_34").unwrap();
        assert!(s.has_coordinates());
        assert_eq!(s.incidences(), 48);
        let back = PyStructure::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back.s, s.s);
    }
}
