//! Scenario definition: a star-shaped road network, targets, depots and
//! vehicle physics, plus the JSON document format and tree-path queries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2D, Polyline};

/// Points within this distance of a branch are considered on the road.
pub const SNAP_TOLERANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerModel {
    UavCubic,
    UgvLinear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleSpec {
    /// m/s
    pub speed: f64,
    /// J
    pub fuel_capacity: f64,
    pub power_model: PowerModel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Depot {
    pub id: usize,
    pub position: Point2D,
    pub ugv_rechargeable: bool,
}

/// A stop region stored as an arclength interval of one branch (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadSegmentRef {
    pub branch_index: usize,
    pub from_arclength: f64,
    pub to_arclength: f64,
}

impl RoadSegmentRef {
    pub fn arclength_at(&self, fraction: f64) -> f64 {
        self.from_arclength + fraction * (self.to_arclength - self.from_arclength)
    }
}

/// Where a point sits on the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadLocation {
    pub branch: usize,
    pub arclength: f64,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub branches: Vec<Polyline>,
    pub targets: Vec<Point2D>,
    pub depots: Vec<Depot>,
    pub uav_spec: VehicleSpec,
    pub ugv_spec: VehicleSpec,
    pub stop_region_1: RoadSegmentRef,
    pub stop_region_2: RoadSegmentRef,
    /// seconds
    pub horizon: f64,
    junction: Point2D,
    junction_arclength: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Document format

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    pub branches: Vec<Vec<[f64; 2]>>,
    pub targets: Vec<[f64; 2]>,
    pub depots: Vec<DepotDoc>,
    pub uav: UavDoc,
    pub ugv: UgvDoc,
    pub stop_region_1: SegmentDoc,
    pub stop_region_2: SegmentDoc,
    pub horizon_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepotDoc {
    pub position: [f64; 2],
    #[serde(default)]
    pub ugv_rechargeable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavDoc {
    pub speed_mps: f64,
    pub fuel_capacity_kj: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UgvDoc {
    pub speed_mps: f64,
    pub fuel_capacity_mj: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDoc {
    pub branch: usize,
    pub from_km: f64,
    pub to_km: f64,
}

const BUNDLED: [(&str, &str); 3] = [
    ("scenario1", include_str!("../scenarios/scenario1.json")),
    ("scenario2", include_str!("../scenarios/scenario2.json")),
    ("scenario3", include_str!("../scenarios/scenario3.json")),
];

/// Names of the scenarios compiled into the library.
pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// Parses and validates a scenario document.
pub fn load_scenario(source: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = serde_json::from_str(source)?;
    Scenario::from_doc(doc)
}

impl Scenario {
    /// One of the bundled fixtures, by name with or without `.json`.
    pub fn bundled(name: &str) -> Result<Scenario> {
        let key = name.strip_suffix(".json").unwrap_or(name);
        BUNDLED
            .iter()
            .find(|(n, _)| *n == key)
            .map(|(_, src)| load_scenario(src))
            .unwrap_or_else(|| Err(Error::UnknownScenario(name.to_string())))
    }

    /// Reads and validates a scenario file.
    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Scenario> {
        load_scenario(&std::fs::read_to_string(path)?)
    }

    pub fn from_doc(doc: ScenarioDoc) -> Result<Scenario> {
        let invalid = |msg: String| Err(Error::Validation(msg));

        if doc.branches.is_empty() {
            return invalid("scenario has no road branches".into());
        }
        let mut branches = Vec::with_capacity(doc.branches.len());
        for (i, b) in doc.branches.iter().enumerate() {
            if b.len() < 2 {
                return invalid(format!("branch {i} needs at least two points"));
            }
            if b.iter().flatten().any(|v| !v.is_finite()) {
                return invalid(format!("branch {i} has a non-finite coordinate"));
            }
            let line = Polyline::new(b.iter().map(|p| Point2D::from_km(p[0], p[1])).collect());
            if line.length() <= 0.0 {
                return invalid(format!("branch {i} has zero length"));
            }
            branches.push(line);
        }

        let junction = find_junction(&branches)
            .ok_or_else(|| Error::Validation("branches do not share a common junction".into()))?;
        let junction_arclength = branches.iter().map(|b| b.project(junction).1).collect();

        if doc.targets.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("target with non-finite coordinate".into());
        }
        let targets = doc.targets.iter().map(|p| Point2D::from_km(p[0], p[1])).collect();

        if doc.depots.is_empty() {
            return invalid("scenario has no depots".into());
        }
        let mut depots = Vec::with_capacity(doc.depots.len());
        for (id, d) in doc.depots.iter().enumerate() {
            let position = Point2D::from_km(d.position[0], d.position[1]);
            let off = branches
                .iter()
                .map(|b| b.distance_to(position))
                .fold(f64::INFINITY, f64::min);
            if !(off <= SNAP_TOLERANCE_M) {
                return invalid(format!("depot {} lies {:.1} m off the road network", id + 1, off));
            }
            depots.push(Depot {
                id,
                position,
                ugv_rechargeable: d.ugv_rechargeable,
            });
        }

        let uav_spec = VehicleSpec {
            speed: doc.uav.speed_mps,
            fuel_capacity: doc.uav.fuel_capacity_kj * 1e3,
            power_model: PowerModel::UavCubic,
        };
        let ugv_spec = VehicleSpec {
            speed: doc.ugv.speed_mps,
            fuel_capacity: doc.ugv.fuel_capacity_mj * 1e6,
            power_model: PowerModel::UgvLinear,
        };
        for (label, spec) in [("uav", &uav_spec), ("ugv", &ugv_spec)] {
            if !(spec.speed > 0.0 && spec.speed.is_finite()) {
                return invalid(format!("{label} speed must be positive"));
            }
            if !(spec.fuel_capacity > 0.0 && spec.fuel_capacity.is_finite()) {
                return invalid(format!("{label} fuel capacity must be positive"));
            }
        }

        let stop_region_1 = segment_ref(&doc.stop_region_1, &branches, "stop_region_1")?;
        let stop_region_2 = segment_ref(&doc.stop_region_2, &branches, "stop_region_2")?;

        if !(doc.horizon_s > 0.0 && doc.horizon_s.is_finite()) {
            return invalid("horizon must be positive".into());
        }

        Ok(Scenario {
            name: doc.name,
            branches,
            targets,
            depots,
            uav_spec,
            ugv_spec,
            stop_region_1,
            stop_region_2,
            horizon: doc.horizon_s,
            junction,
            junction_arclength,
        })
    }

    pub fn junction(&self) -> Point2D {
        self.junction
    }

    /// Closest branch location to `p`, or an error when `p` is farther than the
    /// snap tolerance from every branch.
    pub fn locate(&self, p: Point2D) -> Result<RoadLocation> {
        let mut best: Option<(f64, RoadLocation)> = None;
        for (branch, line) in self.branches.iter().enumerate() {
            let (d, arclength) = line.project(p);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, RoadLocation { branch, arclength }));
            }
        }
        match best {
            Some((d, loc)) if d <= SNAP_TOLERANCE_M => Ok(loc),
            _ => Err(Error::OffNetwork { x: p.x, y: p.y }),
        }
    }

    pub fn point_at(&self, loc: RoadLocation) -> Point2D {
        self.branches[loc.branch].point_at(loc.arclength)
    }

    /// Position of the stop at `fraction` of a stop region.
    pub fn stop_point(&self, region: &RoadSegmentRef, fraction: f64) -> Point2D {
        self.branches[region.branch_index].point_at(region.arclength_at(fraction))
    }

    /// The unique simple path between two on-network points.
    pub fn road_path(&self, a: Point2D, b: Point2D) -> Result<Polyline> {
        let la = self.locate(a)?;
        let lb = self.locate(b)?;
        Ok(self.path_between(la, lb))
    }

    pub fn path_between(&self, a: RoadLocation, b: RoadLocation) -> Polyline {
        if a.branch == b.branch {
            return self.branches[a.branch].slice(a.arclength, b.arclength);
        }
        let mut path = self.branches[a.branch].slice(a.arclength, self.junction_arclength[a.branch]);
        path.extend(&self.branches[b.branch].slice(self.junction_arclength[b.branch], b.arclength));
        path
    }
}

fn segment_ref(doc: &SegmentDoc, branches: &[Polyline], label: &str) -> Result<RoadSegmentRef> {
    let Some(line) = branches.get(doc.branch) else {
        return Err(Error::Validation(format!(
            "{label} references missing branch {}",
            doc.branch
        )));
    };
    let (from, to) = (doc.from_km * 1e3, doc.to_km * 1e3);
    if !(from >= 0.0 && from < to && to <= line.length() + SNAP_TOLERANCE_M) {
        return Err(Error::Validation(format!(
            "{label} must satisfy 0 <= from < to <= branch length ({:.3} km)",
            line.length() / 1e3
        )));
    }
    Ok(RoadSegmentRef {
        branch_index: doc.branch,
        from_arclength: from,
        to_arclength: to.min(line.length()),
    })
}

/// A vertex of the first branch lying on every other branch.
fn find_junction(branches: &[Polyline]) -> Option<Point2D> {
    branches[0]
        .points()
        .iter()
        .copied()
        .find(|p| branches[1..].iter().all(|b| b.distance_to(*p) <= SNAP_TOLERANCE_M))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> ScenarioDoc {
        serde_json::from_str(
            r#"{
            "name": "toy",
            "branches": [[[0,0],[5,0]], [[0,0],[0,4]], [[0,0],[-3,-3]]],
            "targets": [[1,1]],
            "depots": [{"position": [5,0], "ugv_rechargeable": true}],
            "uav": {"speed_mps": 10, "fuel_capacity_kj": 287.7},
            "ugv": {"speed_mps": 4, "fuel_capacity_mj": 25.01},
            "stop_region_1": {"branch": 0, "from_km": 1, "to_km": 2},
            "stop_region_2": {"branch": 1, "from_km": 0.5, "to_km": 3},
            "horizon_s": 10000
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn valid_toy_loads() {
        let s = Scenario::from_doc(doc()).unwrap();
        assert_eq!(s.junction(), Point2D::new(0.0, 0.0));
        assert_eq!(s.stop_region_2.to_arclength, 3000.0);
        assert_eq!(s.uav_spec.fuel_capacity, 287_700.0);
    }

    #[test]
    fn rejects_empty_branches() {
        let mut d = doc();
        d.branches.clear();
        assert!(matches!(Scenario::from_doc(d), Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_off_road_depot() {
        let mut d = doc();
        d.depots[0].position = [5.0, 5.0];
        let err = Scenario::from_doc(d).unwrap_err().to_string();
        assert!(err.contains("off the road"), "{err}");
    }

    #[test]
    fn rejects_disjoint_branches() {
        let mut d = doc();
        d.branches[2] = vec![[10.0, 10.0], [12.0, 12.0]];
        assert!(Scenario::from_doc(d).is_err());
    }

    #[test]
    fn rejects_degenerate_stop_region() {
        let mut d = doc();
        d.stop_region_1.to_km = d.stop_region_1.from_km;
        assert!(Scenario::from_doc(d).is_err());
        let mut d = doc();
        d.stop_region_1.to_km = 9.0;
        assert!(Scenario::from_doc(d).is_err());
    }

    #[test]
    fn rejects_bad_horizon_and_specs() {
        let mut d = doc();
        d.horizon_s = 0.0;
        assert!(Scenario::from_doc(d).is_err());
        let mut d = doc();
        d.uav.fuel_capacity_kj = 0.0;
        assert!(Scenario::from_doc(d).is_err());
        let mut d = doc();
        d.ugv.speed_mps = -1.0;
        assert!(Scenario::from_doc(d).is_err());
    }

    #[test]
    fn malformed_document_is_parse_error() {
        assert!(matches!(load_scenario("{ nope"), Err(Error::Parse(_))));
    }

    #[test]
    fn road_path_identity_and_same_branch() {
        let s = Scenario::from_doc(doc()).unwrap();
        let a = Point2D::from_km(2.0, 0.0);
        assert_eq!(s.road_path(a, a).unwrap().length(), 0.0);
        let b = Point2D::from_km(4.5, 0.0);
        assert!((s.road_path(a, b).unwrap().length() - 2500.0).abs() < 1e-9);
    }

    #[test]
    fn road_path_through_junction() {
        let s = Scenario::from_doc(doc()).unwrap();
        let a = Point2D::from_km(2.0, 0.0);
        let b = Point2D::from_km(0.0, 3.0);
        let p = s.road_path(a, b).unwrap();
        assert!((p.length() - 5000.0).abs() < 1e-9);
        assert_eq!(p.points()[1], Point2D::new(0.0, 0.0));
    }

    #[test]
    fn off_network_point_is_rejected() {
        let s = Scenario::from_doc(doc()).unwrap();
        let r = s.road_path(Point2D::from_km(1.0, 1.0), Point2D::from_km(0.0, 0.0));
        assert!(matches!(r, Err(Error::OffNetwork { .. })));
    }
}
