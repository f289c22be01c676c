use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::oracles::{navier_center_deflection, PinchedCylinder};
use super::BenchError;
use crate::assembly::{LoadSpec, Mesh, PointLoad, PressureField, PressureLoad};
use crate::constitutive::{params_from_young, BendingKind, BendingModel, MaterialSpec, MembraneModel};
use crate::solver::{BoundarySpec, EdgeFix, NewtonOptions, Problem, Side, SymmetryEdge};
use crate::splines::{make_cylinder_patch, make_plate_patch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkName {
    /// Quarter of a simply supported square plate under sinusoidal pressure.
    Plate,
    /// Octant of a cylinder with end diaphragms pinched by two forces, small load.
    PinchedLinear,
    /// The same octant loaded into the large-deformation range.
    PinchedNonlinear,
    /// Octant of an open cylinder pulled apart by two forces.
    Spreading,
}

impl BenchmarkName {
    pub const ALL: [BenchmarkName; 4] = [BenchmarkName::Plate, BenchmarkName::PinchedLinear, BenchmarkName::PinchedNonlinear, BenchmarkName::Spreading];

    pub fn tag(self) -> &'static str {
        match self {
            BenchmarkName::Plate => "plate",
            BenchmarkName::PinchedLinear => "pinched_linear",
            BenchmarkName::PinchedNonlinear => "pinched_nonlinear",
            BenchmarkName::Spreading => "spreading",
        }
    }

    /// Solved with one step about the reference state.
    pub fn is_linear(self) -> bool {
        matches!(self, BenchmarkName::Plate | BenchmarkName::PinchedLinear)
    }

    fn is_cylinder(self) -> bool {
        self != BenchmarkName::Plate
    }
}

impl fmt::Display for BenchmarkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BenchmarkName {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchmarkName::ALL
            .into_iter()
            .find(|n| n.tag() == s.to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| BenchError::Config(format!("unknown benchmark '{s}' (expected plate, pinched_linear, pinched_nonlinear or spreading)")))
    }
}

/// Displacement component `component` at a parametric point, times `sign`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monitor {
    pub name: String,
    pub at: [f64; 2],
    pub component: usize,
    pub sign: f64,
}

impl Monitor {
    fn new(name: &str, at: [f64; 2], component: usize, sign: f64) -> Self {
        Self { name: name.to_string(), at, component, sign }
    }
}

/// Everything needed to reproduce one benchmark run.
///
/// Plates live on `[0, L/2]²`; cylinders are `X(θ, y) = (R sin θ, y, R cos θ)`
/// over `θ ∈ [0, π/2]`, `y ∈ [0, L/2]` with the load at `θ = 0, y = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkDef {
    pub name: BenchmarkName,
    pub model: BendingKind,
    pub degree: usize,
    /// Elements per side.
    pub mesh: usize,
    /// Equal load increments; ignored by the linear benchmarks.
    pub steps: usize,
    /// Interior shear of the plate mesh, in `[0, 1)`.
    pub skew: f64,
    pub radius: f64,
    pub length: f64,
    pub thickness: f64,
    pub young: f64,
    pub poisson: f64,
    /// Pressure amplitude of the plate, total force of the cylinders.
    pub load: f64,
    /// Shear modulus of the apH law, which is incompressible.
    pub aph_mu: f64,
    /// Symmetry penalty `ε = penalty · n^{q−1}` with `n` the element count along the edge.
    pub penalty: f64,
    pub monitors: Vec<Monitor>,
    pub newton: NewtonOptions,
    /// Gauss points per direction; `degree + 1` when absent.
    pub quadrature: Option<usize>,
    /// Sub-cells per element side in the surface export.
    pub vtk_subdivision: usize,
}

impl Default for BenchmarkDef {
    fn default() -> Self {
        Self::new(BenchmarkName::Plate)
    }
}

impl BenchmarkDef {
    /// The default setup of a benchmark with the new bending model.
    pub fn new(name: BenchmarkName) -> Self {
        let base = Self {
            name,
            model: BendingKind::Principal,
            degree: 2,
            mesh: 16,
            steps: 1,
            skew: 0.0,
            radius: 0.0,
            length: 12.0,
            thickness: 0.375,
            young: 480.0,
            poisson: 0.38,
            load: 1.0,
            aph_mu: 60.0,
            penalty: 4.8,
            monitors: vec![],
            newton: NewtonOptions::default(),
            quadrature: None,
            vtk_subdivision: 4,
        };
        let mut def = match name {
            BenchmarkName::Plate => Self { degree: 3, monitors: vec![Monitor::new("center", [1.0, 1.0], 2, 1.0)], ..base },
            BenchmarkName::PinchedLinear => Self {
                radius: 300.0,
                length: 600.0,
                thickness: 3.0,
                young: 3.0,
                poisson: 0.3,
                load: 1e-6,
                aph_mu: 4.5,
                penalty: 600.0,
                mesh: 16,
                ..base
            },
            BenchmarkName::PinchedNonlinear => Self {
                radius: 100.0,
                length: 200.0,
                thickness: 1.0,
                young: 30.0,
                poisson: 0.3,
                load: 12.0,
                mesh: 50,
                steps: 40,
                ..base
            },
            BenchmarkName::Spreading => {
                Self { radius: 4.953, length: 10.35, thickness: 0.094, young: 10.5e3, poisson: 0.3125, load: 40.0, mesh: 20, steps: 40, ..base }
            }
        };
        if !name.is_linear() {
            // incompressible apH with the same Young's modulus
            def.aph_mu = def.young * def.thickness / 3.0;
            def.penalty = 1e3 * def.bending_stiffness() / def.radius;
        }
        def.monitors = match name {
            BenchmarkName::Plate => def.monitors,
            BenchmarkName::PinchedLinear => vec![Monitor::new("A", [0.0, 0.0], 2, -1.0)],
            BenchmarkName::PinchedNonlinear => vec![Monitor::new("A", [0.0, 0.0], 2, -1.0), Monitor::new("B", [1.0, 0.0], 0, 1.0)],
            BenchmarkName::Spreading => vec![
                Monitor::new("A", [0.0, 0.0], 2, 1.0),
                Monitor::new("B", [0.0, 1.0], 2, 1.0),
                Monitor::new("C", [1.0, 1.0], 0, 1.0),
            ],
        };
        def
    }

    /// Defaults of `name` overridden by the fields present in a JSON document;
    /// a `name` field in the document takes precedence.
    pub fn from_json(name: Option<BenchmarkName>, json: &str) -> Result<Self, BenchError> {
        let value: serde_json::Value = serde_json::from_str(json)?;
        let name = match value.get("name") {
            Some(v) => serde_json::from_value(v.clone())?,
            None => name.ok_or_else(|| BenchError::Config("config names no benchmark".into()))?,
        };
        Self::new(name).with_config(json)
    }

    /// Overrides fields with those present in a JSON document. A document
    /// naming another benchmark starts from that benchmark's defaults.
    pub fn with_config(self, json: &str) -> Result<Self, BenchError> {
        let value: serde_json::Value = serde_json::from_str(json)?;
        let base = match value.get("name") {
            Some(v) => {
                let name: BenchmarkName = serde_json::from_value(v.clone())?;
                if name == self.name {
                    self
                } else {
                    Self::new(name)
                }
            }
            None => self,
        };
        let mut merged = serde_json::to_value(base)?;
        match (merged.as_object_mut(), value.as_object()) {
            (Some(m), Some(o)) => {
                for (k, v) in o {
                    m.insert(k.clone(), v.clone());
                }
            }
            _ => return Err(BenchError::Config("config must be a JSON object".into())),
        }
        let def: Self = serde_json::from_value(merged)?;
        def.validate()?;
        Ok(def)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.mesh == 0 {
            return bad("mesh needs at least one element per side".into());
        }
        if self.degree < 2 {
            return bad(format!("degree {} cannot represent a Kirchhoff-Love shell", self.degree));
        }
        if !self.name.is_linear() && self.steps == 0 {
            return bad("a nonlinear run needs at least one load step".into());
        }
        if self.name.is_cylinder() && self.skew != 0.0 {
            return bad("skew applies to the plate only".into());
        }
        if self.vtk_subdivision == 0 {
            return bad("vtk_subdivision must be positive".into());
        }
        for m in &self.monitors {
            if m.component > 2 || !m.at.iter().all(|t| (0.0..=1.0).contains(t)) {
                return bad(format!("monitor '{}' is outside the patch or names a bad component", m.name));
            }
        }
        Ok(())
    }

    /// `E T³ / (12 (1 − ν²))`.
    pub fn bending_stiffness(&self) -> f64 {
        self.young * self.thickness.powi(3) / (12.0 * (1.0 - self.poisson * self.poisson))
    }

    pub fn material(&self) -> Result<MaterialSpec, BenchError> {
        let p = params_from_young(self.young, self.poisson, self.thickness)?;
        let membrane = Some(MembraneModel::Koiter { lambda: p.lambda, mu: p.mu });
        let t = self.thickness;
        let (membrane, bending) = match self.model {
            BendingKind::Koiter => (membrane, BendingModel::Koiter { lambda: p.lambda, mu: p.mu, thickness: t }),
            BendingKind::Canham => (membrane, BendingModel::Canham { c: p.bending_stiffness }),
            BendingKind::Helfrich => {
                let h0 = if self.name.is_cylinder() { -0.5 / self.radius } else { 0.0 };
                (membrane, BendingModel::Helfrich { k: p.helfrich_k, kbar: p.helfrich_kbar, h0 })
            }
            BendingKind::Aph => (None, BendingModel::Aph { mu: self.aph_mu, thickness: t }),
            BendingKind::Principal => (membrane, BendingModel::Principal { c1: p.c1, c2: p.c2, c12: p.c12, c3: p.c3 }),
        };
        Ok(MaterialSpec::new(membrane, Some(bending))?)
    }

    /// Linearized Young's modulus and Poisson ratio of the chosen model.
    pub fn effective_elasticity(&self) -> (f64, f64) {
        match self.model {
            BendingKind::Aph => (3.0 * self.aph_mu / self.thickness, 0.5),
            _ => (self.young, self.poisson),
        }
    }

    /// Exact value of the first monitor for the linear benchmarks.
    pub fn reference(&self) -> Option<f64> {
        let (e, nu) = self.effective_elasticity();
        match self.name {
            BenchmarkName::Plate => {
                let d = e * self.thickness.powi(3) / (12.0 * (1.0 - nu * nu));
                Some(navier_center_deflection(self.load, self.length, d))
            }
            BenchmarkName::PinchedLinear => Some(
                PinchedCylinder { radius: self.radius, length: self.length, thickness: self.thickness, young: e, poisson: nu, force: self.load }
                    .deflection(),
            ),
            _ => None,
        }
    }

    pub fn mesh(&self) -> Result<Mesh, BenchError> {
        let patch = if self.name.is_cylinder() {
            make_cylinder_patch(self.radius, 0.5 * self.length, [0.0, FRAC_PI_2], self.mesh, self.mesh, self.degree)?
        } else {
            make_plate_patch(0.5 * self.length, self.mesh, self.degree, self.skew)?
        };
        Ok(Mesh::new(patch, self.quadrature)?)
    }

    fn symmetry(&self, mesh: &Mesh, side: Side, axis: usize) -> SymmetryEdge {
        let n = side.element_count(mesh) as f64;
        SymmetryEdge { side, axis, penalty: self.penalty * n.powi(self.degree as i32 - 1) }
    }

    pub fn boundary(&self, mesh: &Mesh) -> BoundarySpec {
        let mut b = BoundarySpec::default();
        if self.name.is_cylinder() {
            // θ = 0 lies in x = 0, θ = π/2 in z = 0, y = 0 is mid-length
            b.symmetry = vec![self.symmetry(mesh, Side::UMin, 0), self.symmetry(mesh, Side::UMax, 2), self.symmetry(mesh, Side::VMin, 1)];
            if self.name != BenchmarkName::Spreading {
                b.fixed.push(EdgeFix { side: Side::VMax, components: vec![0, 2] });
            }
        } else {
            b.fixed = vec![EdgeFix { side: Side::UMin, components: vec![2] }, EdgeFix { side: Side::VMin, components: vec![2] }];
            b.symmetry = vec![self.symmetry(mesh, Side::UMax, 0), self.symmetry(mesh, Side::VMax, 1)];
        }
        b
    }

    /// Loads at full load factor.
    pub fn loads(&self) -> LoadSpec {
        match self.name {
            BenchmarkName::Plate => LoadSpec {
                pressure: Some(PressureLoad { field: PressureField::Sine { amplitude: self.load, length: self.length }, follower: false }),
                ..Default::default()
            },
            _ => {
                // a quarter of each force acts on the octant
                let dir = if self.name == BenchmarkName::Spreading { 1.0 } else { -1.0 };
                LoadSpec { point_loads: vec![PointLoad { at: [0.0, 0.0], force: [0.0, 0.0, 0.25 * dir * self.load] }], ..Default::default() }
            }
        }
    }

    pub fn problem(&self) -> Result<Problem, BenchError> {
        self.validate()?;
        let mesh = self.mesh()?;
        let boundary = self.boundary(&mesh);
        Ok(Problem::new(mesh, self.material()?, self.loads(), boundary)?)
    }
}
