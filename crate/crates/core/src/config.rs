//! Scenario files: a flat namespace of dotted keys in TOML.
//!
//! | key | type | default |
//! |-----|------|---------|
//! | `name` | string | `"scenario"` |
//! | `grid.n` | even integer | required |
//! | `grid.L` | float | `8π` (half length) |
//! | `phys.rho` | float | `π` |
//! | `phys.eps` | float ≥ 0 | `0` |
//! | `scheme.formulation` | `split` \| `arctan` \| `new_kernel` | `split` |
//! | `scheme.dt` | float > 0 | unset (use CFL) |
//! | `scheme.cfl` | float > 0 | `0.25` |
//! | `scheme.quadrature` | even integer | `4 * grid.n` |
//! | `scheme.dealias` | bool | `false` |
//! | `scheme.arctan_oversample` | integer ≥ 1 | `2` |
//! | `scheme.kernel` | `closed_form` \| `gauss_laguerre` \| `hybrid` | `closed_form` |
//! | `scheme.kernel_nodes` | integer | `64` |
//! | `run.t_end` | float ≥ 0 | `1` |
//! | `run.snapshot_stride` | integer ≥ 1 | `10` |
//! | `run.diagnostics_stride` | integer ≥ 1 | `1` |
//! | `run.max_steps` | integer ≥ 1 | `1000000` |
//! | `init.kind` | `single_mode` \| `multi_mode` \| `gaussian_bump` \| `from_file` | required |
//! | `init.params` | float array | see below |
//! | `init.amplitude` | float | overrides the leading amplitude |
//! | `init.path` | path | required for `from_file`, relative to the file |
//! | `init.noise` | float ≥ 0 | `0` |
//! | `init.seed` | integer | `0` |
//! | `init.mollify_width` | float ≥ 0 | `0` |
//! | `monitors.small_data` | bool | on for noise-free `single_mode` with amplitude ≤ 0.01 |
//! | `output.dir` | path | unset |
//!
//! `init.params` is `[a, k]` or `[a, k, phase]` for `single_mode`
//! (`a sin(kx + phase)`), a flat list of such triples for `multi_mode`, and
//! `[a, width]` or `[a, width, center]` for `gaussian_bump`.
//!
//! Float values may also be written as strings with a `pi` factor, e.g.
//! `"8pi"`, `"pi/2"`, `"0.5*pi"`.
//!
//! Environment variables `MUSKAT_<SECTION>__<KEY>` override file keys, for
//! example `MUSKAT_GRID__N=512` or `MUSKAT_PHYS__RHO=-1`. Names are matched
//! case-insensitively and values are parsed as TOML (falling back to a
//! plain string).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use toml::Value;

use crate::diagnostics::MonitorGates;
use crate::error::{MuskatError, Result};
use crate::grid::{Field, Grid};
use crate::init::{InitSpec, InitialProfile, Mode};
use crate::operators::KernelQuadrature;
use crate::rhs::{Formulation, PhysicalParams, RhsOptions};
use crate::stepper::{DtRule, SolverConfig};

pub const ENV_PREFIX: &str = "MUSKAT_";

/// Amplitude at or below which single-mode data counts as small by default.
pub const SMALL_DATA_AMPLITUDE: f64 = 0.01;

const KNOWN_KEYS: [&str; 27] = [
    "name",
    "grid.n",
    "grid.l",
    "phys.rho",
    "phys.eps",
    "scheme.formulation",
    "scheme.dt",
    "scheme.cfl",
    "scheme.quadrature",
    "scheme.dealias",
    "scheme.arctan_oversample",
    "scheme.kernel",
    "scheme.kernel_nodes",
    "run.t_end",
    "run.snapshot_stride",
    "run.diagnostics_stride",
    "run.max_steps",
    "init.kind",
    "init.params",
    "init.amplitude",
    "init.path",
    "init.noise",
    "init.seed",
    "init.mollify_width",
    "monitors.small_data",
    "output.dir",
    "description",
];

/// Dotted key → value, keys lowercased.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, Value>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let location = match e.span() {
                Some(span) => line_col(text, span.start),
                None => "input".to_string(),
            };
            MuskatError::config(location, e.message().to_string())
        })?;
        let mut map = ConfigMap::default();
        flatten("", &Value::Table(table), &mut map.entries);
        Ok(map)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.entries.insert(key.to_ascii_lowercase(), value);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(&key.to_ascii_lowercase())
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    /// Apply `MUSKAT_*` overrides from an iterator of environment pairs.
    pub fn apply_env<I, K, V>(&mut self, vars: I)
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        for (k, v) in vars {
            let k = k.as_ref();
            if k.len() <= ENV_PREFIX.len() || !k[..ENV_PREFIX.len()].eq_ignore_ascii_case(ENV_PREFIX) {
                continue;
            }
            let key = k[ENV_PREFIX.len()..].replace("__", ".").to_ascii_lowercase();
            self.set(&key, parse_env_value(v.as_ref()));
        }
    }

    /// Render as a flat TOML document (one dotted key per line).
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let key = if k == "grid.l" { "grid.L" } else { k.as_str() };
            out.push_str(&format!("{key} = {v}\n"));
        }
        out
    }
}

fn line_col(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    format!("line {line}, column {col}")
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() {
                    k.to_ascii_lowercase()
                } else {
                    format!("{prefix}.{}", k.to_ascii_lowercase())
                };
                flatten(&key, v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn parse_env_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.to_string())),
        Err(_) => Value::String(raw.to_string()),
    }
}

/// Parse `"8pi"`, `"pi/2"`, `"0.5*pi"`, `"-pi"`, or a plain number.
fn parse_pi_expr(s: &str) -> Option<f64> {
    let s = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().ok()?),
        None => (s.clone(), 1.0),
    };
    let coeff = num.strip_suffix("pi")?;
    let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
    let c = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().ok()?,
    };
    Some(c * PI / den)
}

struct Reader<'a> {
    map: &'a ConfigMap,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&Value> {
        self.map.get(key)
    }

    fn float(&self, key: &'static str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => as_float(v)
                .map(Some)
                .ok_or_else(|| MuskatError::config(display_key(key), format!("expected a number, found {v}"))),
        }
    }

    fn int(&self, key: &'static str) -> Result<Option<i64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(v) => Err(MuskatError::config(display_key(key), format!("expected an integer, found {v}"))),
        }
    }

    fn positive_int(&self, key: &'static str) -> Result<Option<usize>> {
        match self.int(key)? {
            None => Ok(None),
            Some(i) if i >= 1 => Ok(Some(i as usize)),
            Some(i) => Err(MuskatError::config(display_key(key), format!("must be >= 1, got {i}"))),
        }
    }

    fn boolean(&self, key: &'static str) -> Result<Option<bool>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(MuskatError::config(display_key(key), format!("expected true or false, found {v}"))),
        }
    }

    fn string(&self, key: &'static str) -> Result<Option<String>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(MuskatError::config(display_key(key), format!("expected a string, found {v}"))),
        }
    }

    fn floats(&self, key: &'static str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    as_float(v).ok_or_else(|| {
                        MuskatError::config(display_key(key), format!("element {i} is not a number: {v}"))
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(v) => Err(MuskatError::config(display_key(key), format!("expected an array of numbers, found {v}"))),
        }
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        Value::String(s) => parse_pi_expr(s),
        _ => None,
    }
}

fn display_key(key: &str) -> String {
    if key == "grid.l" {
        "grid.L".to_string()
    } else {
        key.to_string()
    }
}

fn field_error(key: &str, e: MuskatError) -> MuskatError {
    match e {
        MuskatError::Config { .. } => e,
        other => MuskatError::config(display_key(key), other.to_string()),
    }
}

/// A parsed scenario: solver settings, initial data, output location.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub solver: SolverConfig,
    pub init: InitSpec,
    pub mollify_width: f64,
    pub output_dir: Option<PathBuf>,
    /// Flattened keys the scenario was built from.
    pub source: ConfigMap,
}

impl Scenario {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        Self::from_map(ConfigMap::parse(text)?, base_dir)
    }

    /// Read a file, apply environment overrides, and build the scenario.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MuskatError::config(path.display().to_string(), e.to_string()))?;
        let mut map = ConfigMap::parse(&text)?;
        map.apply_env(std::env::vars());
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_map(map, base)
    }

    pub fn from_map(map: ConfigMap, base_dir: &Path) -> Result<Self> {
        if let Some(unknown) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(MuskatError::config(unknown.clone(), "unknown key"));
        }
        let r = Reader { map: &map };
        let name = r.string("name")?.unwrap_or_else(|| "scenario".to_string());

        let n = r
            .int("grid.n")?
            .ok_or_else(|| MuskatError::config("grid.n", "missing required key"))?;
        if n < 4 || n % 2 != 0 {
            return Err(MuskatError::config("grid.n", format!("must be an even integer >= 4, got {n}")));
        }
        let half_length = r.float("grid.l")?.unwrap_or(8.0 * PI);
        let grid = Grid::new(n as usize, half_length).map_err(|e| field_error("grid.l", e))?;

        let rho = r.float("phys.rho")?.unwrap_or(PI);
        let eps = r.float("phys.eps")?.unwrap_or(0.0);
        let params = PhysicalParams::new(rho, eps).map_err(|e| {
            let key = if matches!(e, MuskatError::InvalidParameter { name: "rho", .. }) { "phys.rho" } else { "phys.eps" };
            field_error(key, e)
        })?;

        let formulation = match r.string("scheme.formulation")? {
            Some(s) => s.parse::<Formulation>().map_err(|e| field_error("scheme.formulation", e))?,
            None => Formulation::Split,
        };
        let dt_rule = match (r.float("scheme.dt")?, r.float("scheme.cfl")?) {
            (Some(_), Some(_)) => {
                return Err(MuskatError::config("scheme.dt", "set either scheme.dt or scheme.cfl, not both"))
            }
            (Some(dt), None) => {
                if !(dt > 0.0) {
                    return Err(MuskatError::config("scheme.dt", format!("must be positive, got {dt}")));
                }
                DtRule::Fixed { dt }
            }
            (None, c) => {
                let c = c.unwrap_or(DtRule::DEFAULT_CFL);
                if !(c > 0.0) {
                    return Err(MuskatError::config("scheme.cfl", format!("must be positive, got {c}")));
                }
                DtRule::Cfl { c }
            }
        };
        let quadrature_nodes = match r.positive_int("scheme.quadrature")? {
            Some(m) if m % 2 != 0 => {
                return Err(MuskatError::config("scheme.quadrature", format!("must be even, got {m}")))
            }
            other => other,
        };
        let kernel_nodes = r.positive_int("scheme.kernel_nodes")?.unwrap_or(KernelQuadrature::DEFAULT_NODES);
        let kernel = match r.string("scheme.kernel")?.as_deref() {
            None | Some("closed_form") => KernelQuadrature::ClosedForm,
            Some("gauss_laguerre") => KernelQuadrature::GaussLaguerre { nodes: kernel_nodes },
            Some("hybrid") => KernelQuadrature::Hybrid { nodes: kernel_nodes },
            Some(other) => {
                return Err(MuskatError::config(
                    "scheme.kernel",
                    format!("unknown kernel mode `{other}` (expected closed_form, gauss_laguerre or hybrid)"),
                ))
            }
        };
        let rhs = RhsOptions {
            quadrature_nodes,
            dealias: r.boolean("scheme.dealias")?.unwrap_or(false),
            arctan_oversample: r.positive_int("scheme.arctan_oversample")?.unwrap_or(2),
            kernel,
        };

        let t_end = r.float("run.t_end")?.unwrap_or(1.0);
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(MuskatError::config("run.t_end", format!("must be >= 0, got {t_end}")));
        }

        let init = read_init(&r, base_dir)?;
        let mollify_width = r.float("init.mollify_width")?.unwrap_or(0.0);

        let default_small = matches!(init.profile, InitialProfile::SingleMode(m) if m.amplitude.abs() <= SMALL_DATA_AMPLITUDE)
            && init.noise == 0.0;
        let gates = MonitorGates {
            small_data: r.boolean("monitors.small_data")?.unwrap_or(default_small),
        };

        let solver = SolverConfig {
            grid,
            params,
            formulation,
            rhs,
            dt_rule,
            t_end,
            snapshot_stride: r.positive_int("run.snapshot_stride")?.unwrap_or(10),
            diagnostics_stride: r.positive_int("run.diagnostics_stride")?.unwrap_or(1),
            mollify_width,
            gates,
            max_steps: r.positive_int("run.max_steps")?.unwrap_or(1_000_000),
        };
        solver.validate().map_err(|e| match e {
            MuskatError::InvalidParameter { name, message } => MuskatError::config(name, message),
            other => other,
        })?;
        let output_dir = r.string("output.dir")?.map(|d| base_dir.join(d));
        let _ = r.string("description")?;
        Ok(Self {
            name,
            solver,
            init,
            mollify_width,
            output_dir,
            source: map,
        })
    }

    pub fn initial_field(&self) -> Result<Field> {
        self.init.build(self.solver.grid)
    }
}

fn read_init(r: &Reader<'_>, base_dir: &Path) -> Result<InitSpec> {
    let kind = r
        .string("init.kind")?
        .ok_or_else(|| MuskatError::config("init.kind", "missing required key"))?;
    let params = r.floats("init.params")?;
    let need = |what: &str| MuskatError::config("init.params", format!("{kind} needs {what}"));
    let mut profile = match kind.as_str() {
        "single_mode" => {
            let p = params.ok_or_else(|| need("[amplitude, k] or [amplitude, k, phase]"))?;
            match p.as_slice() {
                [a, k] => InitialProfile::SingleMode(Mode { amplitude: *a, k: *k, phase: 0.0 }),
                [a, k, ph] => InitialProfile::SingleMode(Mode { amplitude: *a, k: *k, phase: *ph }),
                _ => return Err(need("[amplitude, k] or [amplitude, k, phase]")),
            }
        }
        "multi_mode" => {
            let p = params.ok_or_else(|| need("a list of (amplitude, k, phase) triples"))?;
            if p.is_empty() || p.len() % 3 != 0 {
                return Err(need("a list of (amplitude, k, phase) triples"));
            }
            InitialProfile::MultiMode {
                modes: p
                    .chunks(3)
                    .map(|c| Mode { amplitude: c[0], k: c[1], phase: c[2] })
                    .collect(),
            }
        }
        "gaussian_bump" => {
            let p = params.ok_or_else(|| need("[amplitude, width] or [amplitude, width, center]"))?;
            match p.as_slice() {
                [a, w] => InitialProfile::GaussianBump { amplitude: *a, width: *w, center: 0.0 },
                [a, w, c] => InitialProfile::GaussianBump { amplitude: *a, width: *w, center: *c },
                _ => return Err(need("[amplitude, width] or [amplitude, width, center]")),
            }
        }
        "from_file" => {
            let path = r
                .string("init.path")?
                .ok_or_else(|| MuskatError::config("init.path", "missing required key for from_file"))?;
            let path = base_dir.join(path);
            if !path.is_file() {
                return Err(MuskatError::config("init.path", format!("file not found: {}", path.display())));
            }
            InitialProfile::FromFile { path }
        }
        other => {
            return Err(MuskatError::config(
                "init.kind",
                format!("unknown kind `{other}` (expected single_mode, multi_mode, gaussian_bump or from_file)"),
            ))
        }
    };
    if let Some(a) = r.float("init.amplitude")? {
        profile.set_amplitude(a).map_err(|e| field_error("init.amplitude", e))?;
    }
    let noise = r.float("init.noise")?.unwrap_or(0.0);
    if !(noise >= 0.0) {
        return Err(MuskatError::config("init.noise", format!("must be >= 0, got {noise}")));
    }
    let seed = match r.int("init.seed")? {
        None => 0,
        Some(s) if s >= 0 => s as u64,
        Some(s) => return Err(MuskatError::config("init.seed", format!("must be >= 0, got {s}"))),
    };
    Ok(InitSpec { profile, noise, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
name = "demo"
grid.n = 64
phys.rho = 1.0
scheme.formulation = "arctan"
run.t_end = 0.5
init.kind = "single_mode"
init.params = [0.3, 1.0]
"#;

    fn parse(text: &str) -> Result<Scenario> {
        Scenario::from_toml_str(text, Path::new("."))
    }

    #[test]
    fn basic_scenario_and_defaults() {
        let s = parse(BASIC).unwrap();
        assert_eq!(s.name, "demo");
        assert_eq!(s.solver.grid.n_points(), 64);
        assert_eq!(s.solver.grid.half_length(), 8.0 * PI);
        assert_eq!(s.solver.formulation, Formulation::Arctan);
        assert_eq!(s.solver.params.epsilon, 0.0);
        assert_eq!(s.solver.dt_rule, DtRule::Cfl { c: 0.25 });
        assert_eq!(s.solver.alpha_nodes(), 256);
        assert!(!s.solver.gates.small_data);
        assert_eq!(s.initial_field().unwrap().max_abs(), 0.3 * (0.3f64 / 0.3));
    }

    #[test]
    fn table_syntax_is_equivalent() {
        let text = "name = \"demo\"\n[grid]\nn = 64\n[phys]\nrho = 1.0\n[scheme]\nformulation = \"arctan\"\n[run]\nt_end = 0.5\n[init]\nkind = \"single_mode\"\nparams = [0.3, 1.0]\n";
        assert_eq!(parse(text).unwrap().solver, parse(BASIC).unwrap().solver);
    }

    #[test]
    fn missing_grid_n_names_the_field() {
        let err = parse("init.kind = \"single_mode\"\ninit.params = [0.1, 1]\n").unwrap_err();
        match err {
            MuskatError::Config { location, .. } => assert_eq!(location, "grid.n"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let err = parse("grid.n = 64\ninit.kind = = 3\n").unwrap_err();
        match err {
            MuskatError::Config { location, .. } => assert!(location.starts_with("line 2"), "{location}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn bad_values_are_rejected() {
        for (patch, key) in [
            ("grid.n = 63", "grid.n"),
            ("phys.eps = -1.0", "phys.eps"),
            ("scheme.formulation = \"nope\"", "scheme.formulation"),
            ("run.t_end = -1.0", "run.t_end"),
            ("bogus.key = 1", "bogus.key"),
            ("init.mollify_width = 100.0", "init.mollify_width"),
            ("run.snapshot_stride = 0", "run.snapshot_stride"),
        ] {
            let prefix = format!("{key} =");
            let kept: String = BASIC
                .lines()
                .filter(|l| !l.starts_with(&prefix))
                .map(|l| format!("{l}\n"))
                .collect();
            let text = format!("{kept}{patch}\n");
            match parse(&text) {
                Err(MuskatError::Config { location, .. }) => assert_eq!(location, key, "{patch}"),
                other => panic!("{patch}: {other:?}"),
            }
        }
    }

    #[test]
    fn pi_expressions() {
        assert_eq!(parse_pi_expr("8pi"), Some(8.0 * PI));
        assert_eq!(parse_pi_expr("pi/2"), Some(PI / 2.0));
        assert_eq!(parse_pi_expr("0.5*pi"), Some(0.5 * PI));
        assert_eq!(parse_pi_expr("-pi"), Some(-PI));
        assert_eq!(parse_pi_expr("2.5"), Some(2.5));
        assert_eq!(parse_pi_expr("tau"), None);
        let s = parse(&format!("{BASIC}\ngrid.L = \"4pi\"\n")).unwrap();
        assert_eq!(s.solver.grid.half_length(), 4.0 * PI);
    }

    #[test]
    fn env_overrides() {
        let mut map = ConfigMap::parse(BASIC).unwrap();
        map.apply_env([
            ("MUSKAT_GRID__N", "128"),
            ("muskat_phys__rho", "-1"),
            ("MUSKAT_SCHEME__FORMULATION", "new_kernel"),
            ("OTHER_VAR", "1"),
        ]);
        let s = Scenario::from_map(map, Path::new(".")).unwrap();
        assert_eq!(s.solver.grid.n_points(), 128);
        assert_eq!(s.solver.params.rho, -1.0);
        assert_eq!(s.solver.formulation, Formulation::NewKernel);
    }

    #[test]
    fn small_data_gate_default() {
        let small = parse(&BASIC.replace("[0.3, 1.0]", "[0.01, 1.0]")).unwrap();
        assert!(small.solver.gates.small_data);
        let forced = parse(&format!("{BASIC}\nmonitors.small_data = true\n")).unwrap();
        assert!(forced.solver.gates.small_data);
    }

    #[test]
    fn amplitude_override_and_kinds() {
        let s = parse(&format!("{BASIC}\ninit.amplitude = 0.02\n")).unwrap();
        assert_eq!(s.init.profile.amplitude(), Some(0.02));
        let mm = BASIC.replace("\"single_mode\"", "\"multi_mode\"").replace("[0.3, 1.0]", "[0.3, 1.0, 0.0, 0.1, 2.0, 0.5]");
        assert!(matches!(parse(&mm).unwrap().init.profile, InitialProfile::MultiMode { ref modes } if modes.len() == 2));
        let bad = BASIC.replace("\"single_mode\"", "\"multi_mode\"");
        assert!(parse(&bad).is_err());
        let missing = BASIC.replace("\"single_mode\"", "\"from_file\"") + "init.path = \"does/not/exist.csv\"\n";
        match parse(&missing) {
            Err(MuskatError::Config { location, .. }) => assert_eq!(location, "init.path"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flat_rendering_round_trips() {
        let map = ConfigMap::parse(BASIC).unwrap();
        let again = ConfigMap::parse(&map.to_toml()).unwrap();
        assert_eq!(map, again);
    }
}
