use crate::manifest::{hash_dir, hash_file, sha256_bytes, RunManifest};
use crate::params::load_model;
use honesty::approx::{approximate_gateset, ApproxOptions, Family, GateApproximation};
use honesty::physics::{generate_gateset, GateSet, ModelKind, Recipe};
use honesty::qec::{gadget_choi, syndrome_circuit, GadgetReport, GateTable, StabilizerCode, Variant};
use honesty::report::gate_stats_table;
use honesty::stabilizer::{sample_gadget, PauliFaultModel};
use honesty::{Error, Result};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const APPROXIMATIONS_FILE: &str = "approximations.json";
pub const MANIFEST_FILE: &str = "manifest.json";

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub struct GenArgs<'a> {
    pub model: ModelKind,
    pub params: &'a Path,
    pub recipe: Recipe,
    pub out: &'a Path,
    pub duration: Option<f64>,
    pub dt: Option<f64>,
    pub schedules: Option<&'a Path>,
}

pub fn gen_gateset(a: GenArgs) -> Result<()> {
    let started = Instant::now();
    let model = load_model(a.model, a.params)?;
    let gs = generate_gateset(&model, a.recipe, a.duration, a.dt, a.schedules)?;
    let written = gs.save(a.out)?;
    let mut m = RunManifest::new("gen-gateset", json!({ "recipe": a.recipe, "duration_s": gs.duration_s, "dt_s": gs.dt_s }));
    m.inputs.push(hash_file(a.params)?);
    if let Some(dir) = a.schedules {
        m.inputs.extend(hash_dir(dir)?);
    }
    m.write(&a.out.join(MANIFEST_FILE), &written, started)?;
    println!("wrote {} gates to {}", gs.gates.len(), a.out.display());
    Ok(())
}

pub fn approximate(gateset: &Path, family: Family, starts: usize, seed: u64, out: &Path) -> Result<()> {
    let started = Instant::now();
    if starts == 0 {
        return Err(Error::validation("--starts must be at least 1"));
    }
    let gs = GateSet::load(gateset)?;
    if gs.family.is_some() {
        return Err(Error::validation(format!("{} already holds approximations", gateset.display())));
    }
    let opts = ApproxOptions { n_starts: starts, seed, ..Default::default() };
    let (approx, results) = approximate_gateset(&gs, family, &opts)?;
    let mut written = approx.save(out)?;
    let results_path = out.join(APPROXIMATIONS_FILE);
    write_json(&results_path, &results)?;
    written.push(results_path);
    let mut m = RunManifest::new("approximate", json!({ "family": family, "starts": starts }));
    m.inputs = hash_dir(gateset)?;
    m.seeds.push(seed);
    for r in results.iter().filter(|r| r.used != r.requested) {
        m.notes.push(format!("{}: no {} basis for two qubits, used {}", r.gate, r.requested, r.used));
    }
    m.write(&out.join(MANIFEST_FILE), &written, started)?;
    for r in &results {
        let obj = r.result.as_ref().map(|x| format!("{:.6e}", x.objective)).unwrap_or_else(|| "-".into());
        println!("{:>5} {:<9} objective {obj}", r.gate.label(), r.used.label());
    }
    Ok(())
}

pub fn gadget(gatesets: &[PathBuf], code_name: &str, samples: usize, seed: u64, out: &Path) -> Result<()> {
    let started = Instant::now();
    let code = StabilizerCode::by_name(code_name)?;
    let circuit = syndrome_circuit(&code)?;
    let mut results = Vec::new();
    let mut m = RunManifest::new("gadget", json!({ "code": code_name, "samples": samples }));
    for dir in gatesets {
        let gs = GateSet::load(dir)?;
        let variant = Variant::from_family(gs.family);
        if results.iter().any(|(v, _)| *v == variant) {
            return Err(Error::validation(format!("two gate sets give the {} variant", variant.label())));
        }
        log::info!("simulating {} ({})", dir.display(), variant.label());
        results.push((variant, gadget_choi(&code, &circuit, &GateTable::from_gateset(&gs))?));
        m.inputs.extend(hash_dir(dir)?);
    }
    results.sort_by_key(|(v, _)| Variant::ALL.iter().position(|w| w == v));
    let report = GadgetReport::build(code_name, circuit.steps.len(), &results, samples, seed)?;
    write_json(out, &report)?;
    let csv = sibling(out, ".csv");
    std::fs::write(&csv, report.to_csv())?;
    m.seeds.push(seed);
    m.notes.push(format!("schedule sha256 {}", sha256_bytes(serde_json::to_string(&circuit)?.as_bytes())));
    m.notes.push("data wait location shares step 0 with ancilla preparation".into());
    m.write(&sibling(out, ".manifest.json"), &[out.to_path_buf(), csv], started)?;
    print!("{}", report.to_csv());
    Ok(())
}

pub fn gate_stats(gateset: &Path, reference: Option<&Path>, samples: usize, seed: u64, out: Option<&Path>) -> Result<()> {
    let started = Instant::now();
    let gs = GateSet::load(gateset)?;
    let reference_set = reference.map(GateSet::load).transpose()?;
    let rows = gate_stats_table(&gs, reference_set.as_ref(), samples, seed)?;
    let text = serde_json::to_string_pretty(&rows)?;
    match out {
        Some(path) => {
            write_json(path, &rows)?;
            let mut m = RunManifest::new("gate-stats", json!({ "samples": samples }));
            m.inputs = hash_dir(gateset)?;
            if let Some(r) = reference {
                m.inputs.extend(hash_dir(r)?);
            }
            m.seeds.push(seed);
            m.write(&sibling(path, ".manifest.json"), &[path.to_path_buf()], started)?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

pub fn sample(gateset: &Path, code_name: &str, shots: u64, seed: u64, out: Option<&Path>) -> Result<()> {
    let started = Instant::now();
    let code = StabilizerCode::by_name(code_name)?;
    let circuit = syndrome_circuit(&code)?;
    let gs = GateSet::load(gateset)?;
    let mixtures = gateset.join(APPROXIMATIONS_FILE);
    let model = if mixtures.exists() {
        let list: Vec<GateApproximation> = serde_json::from_str(&std::fs::read_to_string(&mixtures)?)?;
        let mut model = PauliFaultModel::new();
        for a in list {
            model.insert(a.gate, a.mixture)?;
        }
        model
    } else {
        PauliFaultModel::from_gate_table(&GateTable::from_gateset(&gs))?
    };
    let est = sample_gadget(&model, &code, &circuit, shots, seed)?;
    match out {
        Some(path) => {
            write_json(path, &est)?;
            let mut m = RunManifest::new("sample", json!({ "code": code_name, "shots": shots }));
            m.inputs = hash_dir(gateset)?;
            m.seeds.push(seed);
            m.write(&sibling(path, ".manifest.json"), &[path.to_path_buf()], started)?;
        }
        None => println!("{}", serde_json::to_string_pretty(&est)?),
    }
    Ok(())
}
