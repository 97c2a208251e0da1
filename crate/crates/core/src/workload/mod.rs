//! VM power model, job requests and workload trace generation.

mod bigdata;
mod faas;
mod trace_io;

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};

#[doc(hidden)]
pub use bigdata::poisson_arrival_count;
pub use bigdata::{load_pool_csv, synth_bigdata, PoolEntry, DEFAULT_UTILIZATION};
pub use faas::{
    interpolate_percentiles, load_function_day, synth_faas, FunctionDay, FunctionStat,
    PERCENTILE_KNOTS,
};
pub use trace_io::{read_trace_csv, write_trace_csv, TRACE_CSV_HEADER};

/// Memory power draw, W/GB.
pub const MEMORY_WATTS_PER_GB: f64 = 0.357;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    Aws,
    Azure,
}

impl Provider {
    /// Per-vCPU (idle, full-load) power draw in watts.
    pub fn cpu_watts(self) -> (f64, f64) {
        match self {
            Provider::Aws => (0.74, 3.5),
            Provider::Azure => (0.78, 3.76),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VmInstance {
    pub name: String,
    pub cpus: u32,
    pub ram_gb: f64,
    pub bandwidth_mbps: f64,
    pub watts_min: f64,
    pub watts_max: f64,
    pub memory_watts_per_gb: f64,
}

impl VmInstance {
    pub fn new(
        name: impl Into<String>,
        provider: Provider,
        cpus: u32,
        ram_gb: f64,
        bandwidth_mbps: f64,
    ) -> Result<Self> {
        let (watts_min, watts_max) = provider.cpu_watts();
        let vm = VmInstance {
            name: name.into(),
            cpus,
            ram_gb,
            bandwidth_mbps,
            watts_min,
            watts_max,
            memory_watts_per_gb: MEMORY_WATTS_PER_GB,
        };
        vm.validate()?;
        Ok(vm)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidVm {
                name: self.name.clone(),
                reason: reason.into(),
            })
        };
        if self.cpus < 1 {
            return fail("needs at least one vCPU");
        }
        if self.ram_gb.is_nan() || self.ram_gb <= 0.0 {
            return fail("RAM must be positive");
        }
        if self.bandwidth_mbps.is_nan() || self.bandwidth_mbps <= 0.0 {
            return fail("bandwidth must be positive");
        }
        if !(0.0 <= self.watts_min && self.watts_min <= self.watts_max) {
            return fail("need 0 <= watts_min <= watts_max");
        }
        Ok(())
    }
}

/// Power draw in watts of `nodes` instances of `vm` at mean CPU utilization
/// `utilization`.
pub fn power_draw(vm: &VmInstance, utilization: f64, nodes: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&utilization) {
        return Err(Error::Utilization(utilization));
    }
    let cpu = vm.watts_min + utilization * (vm.watts_max - vm.watts_min);
    Ok(nodes as f64 * (vm.cpus as f64 * cpu + vm.ram_gb * vm.memory_watts_per_gb))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VmCatalog {
    vms: Vec<VmInstance>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    vm: Vec<CatalogEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogEntry {
    name: String,
    provider: Provider,
    cpus: u32,
    ram_gb: f64,
    bandwidth_mbps: f64,
}

const DEFAULT_CATALOG: &str = include_str!("../../data/vms.toml");

impl VmCatalog {
    pub fn standard() -> Self {
        Self::from_toml_str(DEFAULT_CATALOG).expect("bundled VM catalog is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: CatalogFile = toml::from_str(text).map_err(|e| Error::parse("vm catalog", e))?;
        let vms = file
            .vm
            .into_iter()
            .map(|e| VmInstance::new(e.name, e.provider, e.cpus, e.ram_gb, e.bandwidth_mbps))
            .collect::<Result<Vec<_>>>()?;
        Ok(VmCatalog { vms })
    }

    pub fn get(&self, name: &str) -> Result<&VmInstance> {
        self.vms
            .iter()
            .find(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVm(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &VmInstance> {
        self.vms.iter()
    }
}

/// Set of region indices (at most 64 regions).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct RegionSet(u64);

impl RegionSet {
    pub fn single(region: usize) -> Self {
        let mut s = RegionSet::default();
        s.insert(region);
        s
    }

    pub fn all(count: usize) -> Self {
        (0..count).collect()
    }

    pub fn insert(&mut self, region: usize) {
        assert!(region < 64, "region index out of range");
        self.0 |= 1 << region;
    }

    pub fn contains(&self, region: usize) -> bool {
        region < 64 && self.0 & (1 << region) != 0
    }

    pub fn union(self, other: RegionSet) -> RegionSet {
        RegionSet(self.0 | other.0)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |&i| self.contains(i))
    }
}

impl FromIterator<usize> for RegionSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = RegionSet::default();
        iter.into_iter().for_each(|r| s.insert(r));
        s
    }
}

/// One schedulable request. Region references are indices into the
/// scenario's region list; times are simulation steps (minutes).
#[derive(Debug, Clone, PartialEq)]
pub struct JobRequest {
    /// `<family>#<instance>` for periodic jobs, a plain id otherwise.
    pub id: String,
    pub origin: usize,
    /// Regions holding the job's input data.
    pub data_regions: RegionSet,
    pub size_gb: f64,
    pub nodes: u32,
    pub utilization: f64,
    pub vm: VmInstance,
    pub runtime_min: f64,
    pub arrival: usize,
    pub deadline: usize,
}

impl JobRequest {
    /// Jobs sharing a family share persistently stored data.
    pub fn family(&self) -> &str {
        self.id.split_once('#').map_or(&self.id, |(f, _)| f)
    }

    pub fn power_watts(&self) -> f64 {
        power_draw(&self.vm, self.utilization, self.nodes).expect("validated utilization")
    }

    pub fn validate(&self, regions: usize, horizon_steps: usize) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvalidJob {
                id: self.id.clone(),
                reason,
            })
        };
        if self.origin >= regions {
            return fail(format!("origin index {} out of range", self.origin));
        }
        if !self.data_regions.contains(self.origin) {
            return fail("origin must hold the job's data".into());
        }
        if self.data_regions.iter().any(|r| r >= regions) {
            return fail("data region out of range".into());
        }
        if !(self.size_gb >= 0.0 && self.size_gb.is_finite()) {
            return fail("data size must be nonnegative".into());
        }
        if self.nodes < 1 {
            return fail("needs at least one node".into());
        }
        if !(0.0..=1.0).contains(&self.utilization) {
            return fail(format!("utilization {} outside [0, 1]", self.utilization));
        }
        if !(self.runtime_min > 0.0 && self.runtime_min.is_finite()) {
            return fail("runtime must be positive".into());
        }
        if self.arrival > self.deadline {
            return fail("arrival after deadline".into());
        }
        if self.arrival as f64 + self.runtime_min > horizon_steps as f64 {
            return fail("cannot finish within the horizon".into());
        }
        if self.deadline > horizon_steps {
            return fail("deadline beyond the horizon".into());
        }
        self.vm.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Faas,
    BigData,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceKind::Faas => "faas",
            TraceKind::BigData => "bigdata",
        })
    }
}

impl FromStr for TraceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "faas" => Ok(TraceKind::Faas),
            "bigdata" | "big-data" => Ok(TraceKind::BigData),
            _ => Err(Error::InvalidTraceSpec(format!("unknown trace kind {s:?}"))),
        }
    }
}

/// Parameters of the synthetic trace generators.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSpec {
    pub kind: TraceKind,
    /// FaaS: requests per day. Big data: requests over the whole horizon.
    pub requests: usize,
    pub periodic_fraction: f64,
    pub periods_hours: Vec<usize>,
    /// First instance of a periodic job arrives within this window.
    pub first_arrival_window_hours: usize,
    /// Delay tolerance of ad-hoc big-data jobs.
    pub delay_tolerance_hours: f64,
    pub seed: u64,
}

impl TraceSpec {
    pub fn faas(requests_per_day: usize, seed: u64) -> Self {
        TraceSpec {
            kind: TraceKind::Faas,
            requests: requests_per_day,
            periodic_fraction: 0.0,
            periods_hours: Vec::new(),
            first_arrival_window_hours: 0,
            delay_tolerance_hours: 0.0,
            seed,
        }
    }

    /// 50k requests, half periodic with periods of 2, 4, 8 or 12 hours.
    pub fn bigdata(delay_tolerance_hours: f64, seed: u64) -> Self {
        TraceSpec {
            kind: TraceKind::BigData,
            requests: 50_000,
            periodic_fraction: 0.5,
            periods_hours: vec![2, 4, 8, 12],
            first_arrival_window_hours: 12,
            delay_tolerance_hours,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidTraceSpec(m.into()));
        if self.requests == 0 {
            return fail("request count must be positive");
        }
        if !(0.0..=1.0).contains(&self.periodic_fraction) {
            return fail("periodic fraction must lie in [0, 1]");
        }
        if self.kind == TraceKind::BigData {
            if self.periodic_fraction > 0.0
                && (self.periods_hours.is_empty() || self.periods_hours.contains(&0))
            {
                return fail("periodic jobs need positive periods");
            }
            if self.periodic_fraction > 0.0 && self.first_arrival_window_hours == 0 {
                return fail("first-arrival window must be positive");
            }
            if !(self.delay_tolerance_hours >= 0.0 && self.delay_tolerance_hours.is_finite()) {
                return fail("delay tolerance must be nonnegative");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_goldens() {
        let cat = VmCatalog::standard();
        let faas = cat.get("azure-faas").unwrap();
        assert!((power_draw(faas, 0.0, 1).unwrap() - 2.988).abs() < 1e-12);
        let r4 = cat.get("r4.xlarge").unwrap();
        assert!((power_draw(r4, 1.0, 1).unwrap() - 25.424).abs() < 1e-12);
    }

    #[test]
    fn power_linear_in_nodes_affine_in_utilization() {
        let cat = VmCatalog::standard();
        for vm in cat.iter() {
            for u in [0.0, 0.3, 1.0] {
                let one = power_draw(vm, u, 1).unwrap();
                assert!((power_draw(vm, u, 2).unwrap() - 2.0 * one).abs() < 1e-12);
            }
            let (p0, p1, ph) = (
                power_draw(vm, 0.0, 1).unwrap(),
                power_draw(vm, 1.0, 1).unwrap(),
                power_draw(vm, 0.5, 1).unwrap(),
            );
            assert!((ph - (p0 + p1) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn utilization_out_of_range() {
        let vm = VmCatalog::standard().get("c4.large").unwrap().clone();
        assert!(matches!(
            power_draw(&vm, 1.5, 1),
            Err(Error::Utilization(_))
        ));
        assert!(power_draw(&vm, -0.1, 1).is_err());
    }

    #[test]
    fn region_set_ops() {
        let mut s = RegionSet::single(2);
        assert!(s.contains(2) && !s.contains(0));
        s.insert(2);
        assert_eq!(s.len(), 1);
        s.insert(5);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![2, 5]);
        assert_eq!(RegionSet::all(3).len(), 3);
    }

    #[test]
    fn family_of_periodic_instances() {
        let vm = VmCatalog::standard().get("c4.large").unwrap().clone();
        let mut job = JobRequest {
            id: "p7#3".into(),
            origin: 0,
            data_regions: RegionSet::single(0),
            size_gb: 1.0,
            nodes: 1,
            utilization: 0.5,
            vm,
            runtime_min: 10.0,
            arrival: 0,
            deadline: 10,
        };
        assert_eq!(job.family(), "p7");
        job.id = "a12".into();
        assert_eq!(job.family(), "a12");
        assert!(job.validate(1, 60).is_ok());
        job.data_regions = RegionSet::single(1);
        assert!(job.validate(2, 60).is_err());
    }
}
