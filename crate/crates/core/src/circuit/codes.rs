use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Stabilizer generators and logical operators of a code, on data qubits only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub name: String,
    pub n_data: usize,
    pub n_ancilla: usize,
    pub generators: Vec<PauliString>,
    /// `[X_L, Y_L, Z_L]`.
    pub logicals: [PauliString; 3],
    pub redundant_generator: Option<PauliString>,
}

fn parse_all(labels: &[&str]) -> Vec<PauliString> {
    labels.iter().map(|l| l.parse().expect("static label")).collect()
}

impl CodeDescriptor {
    /// `g_i = Z_i X_{i+1} X_{i+2} Z_{i+3}` for `i = 0..3`; `g_4` is redundant.
    pub fn five_qubit() -> Self {
        let generators = (0..5)
            .map(|i| {
                let mut ops = vec!['I'; 5];
                ops[i] = 'Z';
                ops[(i + 1) % 5] = 'X';
                ops[(i + 2) % 5] = 'X';
                ops[(i + 3) % 5] = 'Z';
                ops.into_iter().collect::<String>().parse().expect("static label")
            })
            .collect::<Vec<PauliString>>();
        let mut generators = generators;
        let redundant = generators.pop();
        let l = parse_all(&["XXXXX", "YYYYY", "ZZZZZ"]);
        Self {
            name: "five_qubit".into(),
            n_data: 5,
            n_ancilla: 5,
            generators,
            logicals: [l[0].clone(), l[1].clone(), l[2].clone()],
            redundant_generator: redundant,
        }
    }

    /// Surface-17 with data qubits on a 3x3 grid, `q = 3 row + col`.
    /// Generator `j` is measured by ancilla `A_j`.
    pub fn surface17() -> Self {
        let generators = crate::circuit::surface17::STABILIZERS
            .iter()
            .map(|(kind, support)| {
                let mut ops = vec!['I'; 9];
                for &q in support.iter() {
                    ops[q] = *kind;
                }
                ops.into_iter().collect::<String>().parse().expect("static label")
            })
            .collect();
        let l = parse_all(&["XIIXIIXII", "YZZXIIXII", "ZZZIIIIII"]);
        Self {
            name: "surface17".into(),
            n_data: 9,
            n_ancilla: 8,
            generators,
            logicals: [l[0].clone(), l[1].clone(), l[2].clone()],
            redundant_generator: None,
        }
    }

    /// All generators, including the redundant one.
    pub fn all_generators(&self) -> Vec<PauliString> {
        self.generators.iter().chain(self.redundant_generator.iter()).cloned().collect()
    }

    /// Replace generator `index` of [`CodeDescriptor::all_generators`].
    pub fn with_generator(mut self, index: usize, generator: PauliString) -> Result<Self> {
        if generator.len() != self.n_data {
            return Err(Error::MalformedPauli(generator.to_string()));
        }
        let n = self.generators.len();
        match index {
            i if i < n => self.generators[i] = generator,
            i if i == n && self.redundant_generator.is_some() => self.redundant_generator = Some(generator),
            _ => return Err(Error::InvalidParameter(format!("no generator {index}"))),
        }
        Ok(self)
    }

    /// Every violated commutation relation, by name.
    pub fn commutation_failures(&self) -> Vec<String> {
        let gens = self.all_generators();
        let mut failures = Vec::new();
        for (i, a) in gens.iter().enumerate() {
            for (j, b) in gens.iter().enumerate().skip(i + 1) {
                if !a.commutes_with(b) {
                    failures.push(format!("generators g{i} = {a} and g{j} = {b} anticommute"));
                }
            }
            for (name, l) in ["X_L", "Y_L", "Z_L"].iter().zip(&self.logicals) {
                if !a.commutes_with(l) {
                    failures.push(format!("generator g{i} = {a} anticommutes with {name} = {l}"));
                }
            }
        }
        failures
    }

    pub fn check(&self) -> Result<()> {
        let failures = self.commutation_failures();
        if failures.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(failures.join("; ")))
        }
    }

    /// Syndrome signs that a Pauli error flips: `-1` where it anticommutes.
    pub fn syndrome_of(&self, error: &PauliString) -> Vec<i8> {
        self.all_generators()
            .iter()
            .map(|g| if g.commutes_with(error) { 1 } else { -1 })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_qubit_generators() {
        let c = CodeDescriptor::five_qubit();
        let labels: Vec<String> = c.all_generators().iter().map(|g| g.to_string()).collect();
        assert_eq!(labels, ["ZXXZI", "IZXXZ", "ZIZXX", "XZIZX", "XXZIZ"]);
        c.check().unwrap();
    }

    #[test]
    fn redundant_generator_is_the_product() {
        let c = CodeDescriptor::five_qubit();
        let mut acc = PauliString::identity(5);
        let mut phase = 0u8;
        for g in &c.generators {
            let (p, prod) = acc.mul(g).unwrap();
            phase = (phase + p) % 4;
            acc = prod;
        }
        assert_eq!(phase, 0);
        assert_eq!(&acc, c.redundant_generator.as_ref().unwrap());
    }

    #[test]
    fn surface17_commutes() {
        CodeDescriptor::surface17().check().unwrap();
    }

    #[test]
    fn corrupted_generator_is_named() {
        let c = CodeDescriptor::five_qubit().with_generator(1, "XIIII".parse().unwrap()).unwrap();
        let failures = c.commutation_failures();
        assert!(!failures.is_empty());
        assert!(failures.iter().any(|f| f.contains("g1 = XIIII")));
    }
}
