use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{MeasurementErrorTable, NoiseParams};
use crate::runner::TrajectoryRecord;

pub const DATASET_FORMAT: &str = "ringqec-dataset";
pub const DATASET_VERSION: u32 = 1;
pub const BIT_CONVENTION: &str = "result +1 -> 0, result -1 -> 1";
/// Ancillas rotate around the ring, so the generator behind a column changes
/// from cycle to cycle.
pub const ANCILLA_ORDER: &str = "column t is ancilla site 2t+1; in cycle c (from 0) it measures generator (t + 4 + 3c) mod 5";

pub fn bit_to_wire(result: i8) -> u8 {
    u8::from(result < 0)
}

/// First line of a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetHeader {
    pub format: String,
    pub version: u32,
    pub bit_convention: String,
    pub ancilla_order: String,
    pub code: String,
    pub state_label: String,
    pub k: usize,
    pub n_records: usize,
    pub seed: u64,
    pub noisy_final_gates: bool,
    pub noise: NoiseParams,
    pub measurement: MeasurementErrorTable,
}

impl DatasetHeader {
    pub fn new(state_label: &str, k: usize, n_records: usize, seed: u64, noise: NoiseParams, measurement: MeasurementErrorTable, noisy_final_gates: bool) -> Self {
        Self {
            format: DATASET_FORMAT.into(),
            version: DATASET_VERSION,
            bit_convention: BIT_CONVENTION.into(),
            ancilla_order: ANCILLA_ORDER.into(),
            code: "five_qubit".into(),
            state_label: state_label.into(),
            k,
            n_records,
            seed,
            noisy_final_gates,
            noise,
            measurement,
        }
    }
}

/// One trajectory with sampled final readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    pub state_label: String,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<[[f64; 2]; 2]>,
    /// `k` rows of five ancilla bits.
    pub ancilla_bits: Vec<[u8; 5]>,
    pub final_data_bits: [u8; 5],
    /// Logical values (`+1 / -1`) derivable from the final bits, keyed `X_L`, `Y_L`, `Z_L`.
    pub logical_readouts: BTreeMap<String, i8>,
    /// Measured logical axis: `X`, `Y` or `Z`.
    pub axis: String,
    /// Logical value times its ideal value; absent when the ideal value is random.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<i8>,
    /// Logical Bloch vector before the final readout.
    pub bloch: [f64; 3],
    pub ub_fidelity: f64,
}

impl TryFrom<&TrajectoryRecord> for DatasetRecord {
    type Error = Error;

    fn try_from(r: &TrajectoryRecord) -> Result<Self> {
        let (Some(bits), Some(readout)) = (r.final_data_bits, r.readout.as_ref()) else {
            return Err(Error::InvalidParameter("dataset records need a sampled final readout".into()));
        };
        Ok(Self {
            state_label: r.initial_state.clone(),
            k: r.k,
            amplitudes: r.amplitudes,
            ancilla_bits: r.ancilla_bits.iter().map(|row| row.map(bit_to_wire)).collect(),
            final_data_bits: bits.map(bit_to_wire),
            logical_readouts: [(format!("{}_L", readout.axis), readout.value)].into(),
            axis: readout.axis.clone(),
            parity: readout.parity,
            bloch: r.bloch,
            ub_fidelity: r.ub_fidelity,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub records: Vec<DatasetRecord>,
}

impl Dataset {
    pub fn validate(&self) -> Result<()> {
        let h = &self.header;
        if h.format != DATASET_FORMAT || h.version != DATASET_VERSION {
            return Err(Error::Format(format!("unsupported dataset {} v{}", h.format, h.version)));
        }
        if self.records.len() != h.n_records {
            return Err(Error::Format(format!("header announces {} records, found {}", h.n_records, self.records.len())));
        }
        for (i, r) in self.records.iter().enumerate() {
            let line = i + 2;
            if r.k != h.k || r.state_label != h.state_label {
                return Err(Error::Format(format!("line {line}: record does not match the header's k and state")));
            }
            if r.ancilla_bits.len() != r.k {
                return Err(Error::Format(format!("line {line}: {} syndrome rows for k = {}", r.ancilla_bits.len(), r.k)));
            }
            if r.ancilla_bits.iter().flatten().chain(&r.final_data_bits).any(|&b| b > 1) {
                return Err(Error::Format(format!("line {line}: bits must be 0 or 1")));
            }
        }
        Ok(())
    }
}

/// Header line, then one record per line.
pub fn write_dataset<W: Write>(mut out: W, dataset: &Dataset) -> Result<()> {
    dataset.validate()?;
    writeln!(out, "{}", serde_json::to_string(&dataset.header)?)?;
    for r in &dataset.records {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dataset<R: BufRead>(input: R) -> Result<Dataset> {
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| Error::Format("empty dataset".into()))??;
    let header: DatasetHeader = serde_json::from_str(&first)?;
    let records = lines
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect::<Result<Vec<DatasetRecord>>>()?;
    let d = Dataset { header, records };
    d.validate()?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::LogicalReadout;

    fn sample() -> Dataset {
        let traj = TrajectoryRecord {
            initial_state: "+".into(),
            amplitudes: None,
            k: 2,
            ancilla_bits: vec![[1, -1, 1, 1, 1], [1, 1, 1, -1, 1]],
            final_data_bits: Some([1, -1, -1, 1, 1]),
            readout: Some(LogicalReadout {
                axis: "X".into(),
                value: 1,
                parity: Some(1),
            }),
            bloch: [0.97, 0.0, 0.01],
            ub_fidelity: 0.985,
        };
        let rec = DatasetRecord::try_from(&traj).unwrap();
        let header = DatasetHeader::new("+", 2, 2, 9, NoiseParams::default(), MeasurementErrorTable::default(), true);
        Dataset {
            header,
            records: vec![rec.clone(), rec],
        }
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let d = sample();
        assert_eq!(d.records[0].ancilla_bits, vec![[0, 1, 0, 0, 0], [0, 0, 0, 1, 0]]);
        assert_eq!(d.records[0].logical_readouts["X_L"], 1);
        let mut first = Vec::new();
        write_dataset(&mut first, &d).unwrap();
        let back = read_dataset(first.as_slice()).unwrap();
        assert_eq!(back, d);
        let mut second = Vec::new();
        write_dataset(&mut second, &back).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn shape_errors_are_reported() {
        let mut d = sample();
        d.records[1].ancilla_bits.pop();
        assert!(matches!(d.validate(), Err(Error::Format(_))));
        let mut d = sample();
        d.header.n_records = 3;
        assert!(d.validate().is_err());
        let text = "{\"format\":\"ringqec-dataset\"}\n";
        assert!(read_dataset(text.as_bytes()).is_err());
    }
}
