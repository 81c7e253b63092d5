//! Gate-set synthesis, simulation and on-disk storage.

use super::cumulant::{cumulant_gate, CumulantResult};
use super::hamiltonian::{relaxation_ops, ControlSchedule};
use super::model::NoiseModel;
use super::pulses::{on_grid, xy_frames, xy_sequence, PulseBuilder, XyKind};
use crate::approx::Family;
use crate::channel::{compose, io, Channel};
use crate::error::{Error, Result};
use crate::linalg::{self, hadamard, pauli, rotation, CMat};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateName {
    I,
    X,
    Y,
    Z,
    H,
    #[serde(rename = "CNOT")]
    Cnot,
}

impl GateName {
    pub const ALL: [GateName; 6] = [GateName::I, GateName::X, GateName::Y, GateName::Z, GateName::H, GateName::Cnot];

    pub fn label(&self) -> &'static str {
        match self {
            GateName::I => "I",
            GateName::X => "X",
            GateName::Y => "Y",
            GateName::Z => "Z",
            GateName::H => "H",
            GateName::Cnot => "CNOT",
        }
    }

    pub fn n_qubits(&self) -> usize {
        if *self == GateName::Cnot {
            2
        } else {
            1
        }
    }

    pub fn ideal(&self) -> CMat {
        match self {
            GateName::I => pauli(0),
            GateName::X => pauli(1),
            GateName::Y => pauli(2),
            GateName::Z => pauli(3),
            GateName::H => hadamard(),
            GateName::Cnot => linalg::cnot(),
        }
    }
}

impl std::fmt::Display for GateName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for GateName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GateName::ALL
            .into_iter()
            .find(|g| g.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation(format!("unknown gate '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recipe {
    Gs2,
    Gs3,
    External,
}

impl Recipe {
    pub fn default_duration(&self) -> Option<f64> {
        match self {
            Recipe::Gs2 => Some(168e-9),
            Recipe::Gs3 => Some(25e-9),
            Recipe::External => None,
        }
    }

    pub fn default_dt(&self) -> f64 {
        match self {
            Recipe::Gs2 => 0.25e-9,
            Recipe::Gs3 | Recipe::External => 0.1e-9,
        }
    }
}

impl std::str::FromStr for Recipe {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gs2" => Ok(Recipe::Gs2),
            "gs3" => Ok(Recipe::Gs3),
            "external" => Ok(Recipe::External),
            "gs1" => Err(Error::validation("recipe gs1 is not synthesized; supply schedules with the external recipe")),
            _ => Err(Error::validation(format!("unknown recipe '{s}'"))),
        }
    }
}

/// Control schedule plus the ideal frame rotation applied after it.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub name: GateName,
    pub schedule: ControlSchedule,
    pub frame: CMat,
}

#[derive(Clone, Debug)]
pub struct Gate {
    pub name: GateName,
    pub ideal: CMat,
    /// Noisy implementation Λ.
    pub channel: Channel,
}

impl Gate {
    /// Post-gate error ℰ = Λ∘U†, so that Λ = ℰ∘U.
    pub fn error(&self) -> Channel {
        compose(&self.channel, &Channel::unitary(&self.ideal.adjoint())).expect("dimensions agree")
    }
}

#[derive(Clone, Debug)]
pub struct GateSet {
    pub recipe: Recipe,
    pub model: NoiseModel,
    pub duration_s: f64,
    pub dt_s: f64,
    pub gates: Vec<Gate>,
    /// Set when the channels are approximations of a generated set.
    pub family: Option<Family>,
}

impl GateSet {
    pub fn get(&self, name: GateName) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }
}

fn y_rot(theta: f64) -> CMat {
    rotation([0.0, 1.0, 0.0], theta)
}

fn x_rot(theta: f64) -> CMat {
    rotation([1.0, 0.0, 0.0], theta)
}

/// CNOT ∝ R4·R3·W·R2·R1 with W = exp(-iπ ZZ/4); the R_k act on one qubit each.
fn cnot_pieces() -> [(usize, CMat); 4] {
    [(0, rotation([0.0, 0.0, 1.0], -FRAC_PI_2)), (1, y_rot(-FRAC_PI_2)), (1, y_rot(FRAC_PI_2)), (1, x_rot(-FRAC_PI_2))]
}

fn steps(duration: f64, grid: f64) -> Result<usize> {
    let k = duration / grid;
    if (k - k.round()).abs() > 1e-6 || k.round() < 1.0 {
        return Err(Error::validation(format!("duration {duration} s is not a positive multiple of {grid} s")));
    }
    Ok(k.round() as usize)
}

fn check_fits(need: f64, have: f64, what: &str) -> Result<()> {
    if need > have * (1.0 + 1e-9) {
        return Err(Error::validation(format!("{what} needs {need:.3e} s but only {have:.3e} s are available")));
    }
    Ok(())
}

/// Single constant pulse filling the gate, with Z rotations in the frame.
fn gs3_single(name: GateName, model: &NoiseModel, duration: f64) -> Result<Synthesis> {
    let (amax, _, _) = model.bounds();
    let u = name.ideal();
    check_fits(PulseBuilder::max_angle(&[(0, u.clone())]) / amax, duration, "pulse")?;
    let mut b = PulseBuilder::new(1);
    b.rotate(duration, &[(0, u)])?;
    b.idle_until(duration)?;
    let (schedule, frame) = b.finish()?;
    Ok(Synthesis { name, schedule, frame })
}

/// Three π/2 pulses around a ZZ segment; a quarter of the gate per pulse and the
/// rest for the coupling.
fn gs3_cnot(model: &NoiseModel, duration: f64) -> Result<Synthesis> {
    let (amax, _, cmax) = model.bounds();
    let grid = model.control_dt();
    let m = steps(duration, grid)?;
    let tp = (m / 4) as f64 * grid;
    let tz = duration - 3.0 * tp;
    check_fits(FRAC_PI_2 / amax, tp, "π/2 pulse")?;
    check_fits(FRAC_PI_2 / cmax, tz, "ZZ rotation")?;
    let [r1, r2, r3, r4] = cnot_pieces();
    let mut b = PulseBuilder::new(2);
    b.rotate(0.0, &[r1])?;
    b.rotate(tp, &[r2])?;
    b.segment(tz, &[], -FRAC_PI_2 / tz);
    b.rotate(tp, &[r3])?;
    b.rotate(tp, &[r4])?;
    let (schedule, frame) = b.finish()?;
    Ok(Synthesis { name: GateName::Cnot, schedule, frame })
}

/// XY4 slots of [π pulse][piece][idle]; for CNOT both qubits are decoupled and
/// the ZZ segment closes the second slot.
fn gs2_gate(name: GateName, model: &NoiseModel, duration: f64) -> Result<Synthesis> {
    let (amax, _, cmax) = model.bounds();
    let grid = model.control_dt();
    let slot = duration / 4.0;
    steps(slot, grid)?;
    let t_pi = on_grid(PI / amax, grid);
    let n = name.n_qubits();
    let qubits: Vec<usize> = (0..n).collect();
    let frames = xy_frames(XyKind::Xy4);
    let pieces: Vec<Vec<(usize, CMat)>> = if name == GateName::Cnot {
        cnot_pieces()
            .into_iter()
            .zip(&frames)
            .map(|((q, r), (_, f))| vec![(q, f * r * f.adjoint())])
            .collect()
    } else {
        xy_sequence(&name.ideal(), XyKind::Xy4).into_iter().map(|(_, u)| vec![(0, u)]).collect()
    };
    let mut b = PulseBuilder::new(n);
    for (k, ((a, _), piece)) in frames.iter().zip(&pieces).enumerate() {
        let pulses: Vec<(usize, CMat)> = qubits.iter().map(|&q| (q, a.clone())).collect();
        b.rotate(t_pi, &pulses)?;
        let t_piece = on_grid(PulseBuilder::max_angle(piece) / amax, grid);
        b.rotate(t_piece, piece)?;
        let end = (k + 1) as f64 * slot;
        if name == GateName::Cnot && k == 1 {
            let tz = on_grid(FRAC_PI_2 / cmax, grid);
            b.idle_until(end - tz)?;
            b.segment(tz, &[], -FRAC_PI_2 / tz);
        }
        b.idle_until(end)?;
    }
    let (schedule, frame) = b.finish()?;
    Ok(Synthesis { name, schedule, frame })
}

pub fn synthesize(recipe: Recipe, name: GateName, model: &NoiseModel, duration: f64) -> Result<Synthesis> {
    match (recipe, name) {
        (Recipe::Gs3, GateName::Cnot) => gs3_cnot(model, duration),
        (Recipe::Gs3, _) => gs3_single(name, model, duration),
        (Recipe::Gs2, _) => gs2_gate(name, model, duration),
        (Recipe::External, _) => Err(Error::validation("external gates are read from schedule files")),
    }
}

/// Simulates one synthesized gate.
pub fn simulate(model: &NoiseModel, syn: &Synthesis, dt: f64) -> Result<(Gate, CumulantResult)> {
    let n = syn.schedule.n_qubits;
    let res = cumulant_gate(model, &syn.schedule, dt, &relaxation_ops(model.t1(), n))?;
    let channel = compose(&Channel::unitary(&syn.frame), &res.channel)?;
    Ok((Gate { name: syn.name, ideal: syn.name.ideal(), channel }, res))
}

/// Reads `<NAME>.json` schedule files (JSON arrays of segments) from `dir`.
pub fn external_syntheses(dir: &Path) -> Result<Vec<Synthesis>> {
    let mut out = Vec::new();
    for name in GateName::ALL {
        let path = dir.join(format!("{}.json", name.label()));
        if !path.exists() {
            continue;
        }
        let text = std::fs::read_to_string(&path)?;
        let schedule = ControlSchedule::from_json(name.n_qubits(), &text)?;
        out.push(Synthesis { name, schedule, frame: linalg::eye(1 << name.n_qubits()) });
    }
    if out.is_empty() {
        return Err(Error::validation(format!("no gate schedules found in {}", dir.display())));
    }
    Ok(out)
}

pub fn generate_gateset(
    model: &NoiseModel,
    recipe: Recipe,
    duration: Option<f64>,
    dt: Option<f64>,
    external_dir: Option<&Path>,
) -> Result<GateSet> {
    model.validate()?;
    let dt = dt.unwrap_or(recipe.default_dt());
    let syns = match recipe {
        Recipe::External => {
            let dir = external_dir.ok_or_else(|| Error::validation("the external recipe needs a schedule directory"))?;
            external_syntheses(dir)?
        }
        _ => {
            let d = duration.or(recipe.default_duration()).expect("synthesized recipes have a default");
            GateName::ALL.iter().map(|&g| synthesize(recipe, g, model, d)).collect::<Result<Vec<_>>>()?
        }
    };
    let duration_s = syns.iter().map(|s| s.schedule.duration()).fold(0.0, f64::max);
    let mut gates = Vec::new();
    for syn in &syns {
        let (gate, res) = simulate(model, syn, dt)?;
        log::info!("{}: {} steps, min Choi eigenvalue {:.3e}", syn.name, res.steps, res.min_choi_eigenvalue);
        gates.push(gate);
    }
    Ok(GateSet { recipe, model: model.clone(), duration_s, dt_s: dt, gates, family: None })
}

#[derive(Serialize, Deserialize)]
struct GateSetManifest {
    recipe: Recipe,
    duration_s: f64,
    dt_s: f64,
    model: NoiseModel,
    gates: Vec<GateName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<Family>,
}

pub const GATESET_MANIFEST: &str = "gateset.json";

pub fn gate_file_name(name: GateName) -> String {
    format!("{}.json", name.label())
}

impl GateSet {
    /// Writes `gateset.json` and one channel file per gate.
    pub fn save(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for g in &self.gates {
            let p = dir.join(gate_file_name(g.name));
            io::save(&g.channel, &p)?;
            written.push(p);
        }
        let manifest = GateSetManifest {
            recipe: self.recipe,
            duration_s: self.duration_s,
            dt_s: self.dt_s,
            model: self.model.clone(),
            gates: self.gates.iter().map(|g| g.name).collect(),
            family: self.family,
        };
        let p = dir.join(GATESET_MANIFEST);
        std::fs::write(&p, serde_json::to_string_pretty(&manifest)?)?;
        written.push(p);
        Ok(written)
    }

    pub fn load(dir: &Path) -> Result<GateSet> {
        let text = std::fs::read_to_string(dir.join(GATESET_MANIFEST))?;
        let m: GateSetManifest = serde_json::from_str(&text)?;
        let gates = m
            .gates
            .iter()
            .map(|&name| {
                let channel = io::load(&dir.join(gate_file_name(name)))?;
                Ok(Gate { name, ideal: name.ideal(), channel })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GateSet { recipe: m.recipe, model: m.model, duration_s: m.duration_s, dt_s: m.dt_s, gates, family: m.family })
    }
}

/// Noiseless unitary produced by a synthesis, for checking recipes.
pub fn synthesized_unitary(syn: &Synthesis, model: &NoiseModel) -> CMat {
    use super::cumulant::propagator;
    use super::hamiltonian::hamiltonian_terms;
    let n = syn.schedule.n_qubits;
    let mut u = linalg::eye(1 << n);
    for seg in &syn.schedule.segments {
        let (h0, _) = hamiltonian_terms(model, &seg.into());
        u = propagator(&h0, seg.duration_s) * u;
    }
    &syn.frame * u
}
