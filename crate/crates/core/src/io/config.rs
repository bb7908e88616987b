use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{CycleOptions, PaddingPlacement};
use crate::error::{Error, Result};
use crate::noise::{MeasurementErrorTable, NoiseModel, NoiseParams};
use crate::parallel::Parallelism;
use crate::runner::{Engine, InitialState, SimulatorOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeChoice {
    #[default]
    FiveQubit,
    /// Noiseless Surface-17 verification runs.
    Surface17Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePreset {
    #[default]
    Default,
    Off,
    /// Relaxation and dephasing only, `T2 = T1`.
    Decoherence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutModel {
    Ideal,
    /// The back-to-back error table.
    Table,
}

/// Individual noise parameters replacing the preset's values.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseOverrides {
    pub t1_us: Option<f64>,
    pub t2_us: Option<f64>,
    pub tau1_ns: Option<f64>,
    pub tau2_ns: Option<f64>,
    pub t_meas_ns: Option<f64>,
    pub t_reset_ns: Option<f64>,
    pub t_cycle_ns: Option<f64>,
    pub p_axis: Option<f64>,
    pub p_plane: Option<f64>,
    pub phi_rms: Option<f64>,
    pub sigma_zeta: Option<f64>,
}

impl NoiseOverrides {
    pub fn apply(&self, p: &mut NoiseParams) {
        let set = |dst: &mut f64, src: Option<f64>| {
            if let Some(v) = src {
                *dst = v;
            }
        };
        set(&mut p.t1_us, self.t1_us);
        set(&mut p.t2_us, self.t2_us);
        set(&mut p.tau1_ns, self.tau1_ns);
        set(&mut p.tau2_ns, self.tau2_ns);
        set(&mut p.t_meas_ns, self.t_meas_ns);
        set(&mut p.t_reset_ns, self.t_reset_ns);
        set(&mut p.t_cycle_ns, self.t_cycle_ns);
        set(&mut p.p_axis, self.p_axis);
        set(&mut p.p_plane, self.p_plane);
        set(&mut p.phi_rms, self.phi_rms);
        set(&mut p.sigma_zeta, self.sigma_zeta);
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub summary: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub fit: Option<PathBuf>,
}

/// Everything a simulation or dataset run needs. Mirrors the CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub code: CodeChoice,
    /// Cardinal label (`0 1 + - i+ i-`) or `0L` / `1L` for exact code states.
    pub initial_state: String,
    /// `[[re, im], [re, im]]` of `alpha` and `beta`; overrides `initial_state`.
    pub amplitudes: Option<[[f64; 2]; 2]>,
    pub k_max: usize,
    pub n_runs: usize,
    pub seed: Option<u64>,
    /// Worker count; absent means the environment default.
    pub threads: Option<usize>,
    pub noise: NoisePreset,
    /// Defaults to the table for noisy presets and ideal for `off`.
    pub readout: Option<ReadoutModel>,
    pub overrides: NoiseOverrides,
    pub padding: PaddingPlacement,
    pub noisy_final_gates: bool,
    pub engine: Engine,
    pub output: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            code: CodeChoice::FiveQubit,
            initial_state: "0".into(),
            amplitudes: None,
            k_max: 30,
            n_runs: 1000,
            seed: None,
            threads: None,
            noise: NoisePreset::Default,
            readout: None,
            overrides: NoiseOverrides::default(),
            padding: PaddingPlacement::default(),
            noisy_final_gates: true,
            engine: Engine::Instrument,
            output: OutputPaths::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        let mut params = match self.noise {
            NoisePreset::Default => NoiseParams::default(),
            NoisePreset::Off => NoiseParams::noiseless(),
            NoisePreset::Decoherence => NoiseParams::decoherence_only(self.overrides.t1_us.unwrap_or(30.0)),
        };
        self.overrides.apply(&mut params);
        let readout = self.readout.unwrap_or(match self.noise {
            NoisePreset::Default => ReadoutModel::Table,
            _ => ReadoutModel::Ideal,
        });
        let measurement = match readout {
            ReadoutModel::Ideal => MeasurementErrorTable::ideal(),
            ReadoutModel::Table => MeasurementErrorTable::default(),
        };
        let model = NoiseModel { params, measurement };
        model.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(model)
    }

    pub fn initial(&self) -> Result<InitialState> {
        match self.amplitudes {
            Some([[ar, ai], [br, bi]]) => Ok(InitialState::Amplitudes(Complex64::new(ar, ai), Complex64::new(br, bi))),
            None => self
                .initial_state
                .parse()
                .map_err(|_| Error::Config(format!("unknown initial state {:?}", self.initial_state))),
        }
    }

    pub fn parallelism(&self) -> Parallelism {
        self.threads.map_or(Parallelism::Auto, Parallelism::from_count)
    }

    pub fn simulator_options(&self) -> SimulatorOptions {
        SimulatorOptions {
            cycle: CycleOptions { padding: self.padding },
            noisy_final_gates: self.noisy_final_gates,
            engine: self.engine,
            build_parallelism: self.parallelism(),
        }
    }

    /// Checks that do not need the file system.
    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::Config("n_runs must be at least 1".into()));
        }
        if self.k_max == 0 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        self.initial()?;
        self.noise_model()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig {
            seed: Some(7),
            k_max: 12,
            ..RunConfig::default()
        };
        c.overrides.t1_us = Some(20.0);
        c.output.summary = Some("out.csv".into());
        let back = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.noise_model().unwrap().params.t1_us, 20.0);
    }

    #[test]
    fn partial_files_use_defaults() {
        let c = RunConfig::from_toml("initial_state = \"i+\"\nnoise = \"off\"\n").unwrap();
        assert_eq!(c.k_max, 30);
        assert_eq!(c.noise_model().unwrap(), NoiseModel::noiseless());
        assert!(RunConfig::from_toml("colour = 1").is_err());
        assert!(RunConfig::from_toml("initial_state = \"2\"").unwrap().validate().is_err());
    }
}
