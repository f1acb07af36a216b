use serde::{Deserialize, Serialize};
use specseq::algebra::{group_algebra, FdAlgebra, FdModule, GroupTable};
use specseq::linalg::{FieldSpec, FpMatrix};
use std::path::Path;
use std::sync::Arc;

pub const SCHEMA: u32 = 1;

/// A group given by name (`cyclic:n`, `klein4`, `q8`, `s3`), as `{cyclic = n}`, or as a Cayley table.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(String),
    Cyclic { cyclic: usize },
    Table { table: Vec<Vec<usize>> },
}

/// `"trivial"`, `"regular"`, or one action matrix per generator of the group.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum ModuleSpec {
    Named(String),
    Explicit { dim: usize, action: Vec<Vec<Vec<i64>>> },
}

/// Instance document read from `--instance`; command-line flags override its fields.
#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunDescriptor {
    pub schema: Option<u32>,
    pub p: Option<u32>,
    pub group: Option<GroupSpec>,
    pub subgroup: Option<Vec<usize>>,
    pub module: Option<ModuleSpec>,
    pub degree: Option<usize>,
    pub pages: Option<i64>,
    pub waive: Option<bool>,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Parses JSON or TOML, chosen by extension and falling back to the other format.
pub fn read_document<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    let json = || serde_json::from_str::<T>(&text).map_err(|e| format!("JSON: {e}"));
    let toml = || toml::from_str::<T>(&text).map_err(|e| format!("TOML: {e}"));
    let res = if is_toml { toml().or_else(|e| json().map_err(|_| e)) } else { json().or_else(|e| toml().map_err(|_| e)) };
    res.map_err(|e| usage(format!("{}: {e}", path.display())))
}

impl RunDescriptor {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let d: Self = read_document(path)?;
        match d.schema {
            Some(s) if s != SCHEMA => Err(usage(format!("unsupported schema {s}, expected {SCHEMA}"))),
            _ => Ok(d),
        }
    }

    pub fn field(&self) -> Result<FieldSpec, UsageError> {
        let p = self.p.unwrap_or(2);
        FieldSpec::new(p).map_err(|e| usage(format!("p = {p}: {e}")))
    }

    pub fn group(&self) -> Result<GroupTable, UsageError> {
        let spec = self.group.as_ref().ok_or_else(|| usage("no group given"))?;
        parse_group(spec)
    }

    pub fn degree(&self) -> usize {
        self.degree.unwrap_or(4)
    }

    /// Subgroup as a sorted element list, verified to be closed.
    pub fn subgroup(&self, g: &GroupTable) -> Result<Option<Vec<usize>>, UsageError> {
        let Some(s) = &self.subgroup else { return Ok(None) };
        if let Some(&x) = s.iter().find(|&&x| x >= g.order()) {
            return Err(usage(format!("subgroup element {x} is out of range for a group of order {}", g.order())));
        }
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        if !g.is_subgroup(&s) {
            return Err(usage(format!("{s:?} is not closed under multiplication")));
        }
        Ok(Some(s))
    }

    pub fn module(&self, g: &GroupTable, alg: &Arc<FdAlgebra>) -> Result<FdModule, UsageError> {
        build_module(self.module.as_ref().unwrap_or(&ModuleSpec::Named("trivial".into())), g, alg)
    }
}

pub fn parse_group(spec: &GroupSpec) -> Result<GroupTable, UsageError> {
    let cyclic = |n: usize| {
        if n == 0 {
            Err(usage("cyclic group of order 0"))
        } else {
            Ok(GroupTable::cyclic(n))
        }
    };
    match spec {
        GroupSpec::Cyclic { cyclic: n } => cyclic(*n),
        GroupSpec::Table { table } => GroupTable::new(table.clone()).map_err(|e| usage(format!("Cayley table: {e}"))),
        GroupSpec::Named(name) => match name.as_str() {
            "klein4" => Ok(GroupTable::klein4()),
            "q8" => Ok(GroupTable::quaternion8()),
            "s3" => Ok(GroupTable::symmetric3()),
            other => match other.strip_prefix("cyclic:") {
                Some(n) => cyclic(n.parse().map_err(|_| usage(format!("bad order in {other:?}")))?),
                None => Err(usage(format!("unknown group {other:?}; expected cyclic:n, klein4, q8 or s3"))),
            },
        },
    }
}

pub fn parse_subgroup(s: &str) -> Result<Vec<usize>, UsageError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse().map_err(|_| usage(format!("bad subgroup element {t:?}")))).collect()
}

pub fn group_alg(g: &GroupTable, f: FieldSpec) -> Arc<FdAlgebra> {
    Arc::new(group_algebra(g, f))
}

/// The module with the given generator matrices, extended to every group element along words.
pub fn build_module(spec: &ModuleSpec, g: &GroupTable, alg: &Arc<FdAlgebra>) -> Result<FdModule, UsageError> {
    let f = alg.field();
    match spec {
        ModuleSpec::Named(n) if n == "trivial" => Ok(FdModule::character(alg.clone(), &vec![1; g.order()]).expect("trivial character")),
        ModuleSpec::Named(n) if n == "regular" => Ok(FdModule::regular(alg.clone())),
        ModuleSpec::Named(n) => Err(usage(format!("unknown module {n:?}; expected trivial, regular or {{dim, action}}"))),
        ModuleSpec::Explicit { dim, action } => {
            let gens = g.generators();
            if action.len() != gens.len() {
                return Err(usage(format!("{} action matrices given, the group has {} generators {gens:?}", action.len(), gens.len())));
            }
            let mats: Vec<FpMatrix> = action
                .iter()
                .enumerate()
                .map(|(i, rows)| {
                    if rows.len() != *dim || rows.iter().any(|r| r.len() != *dim) {
                        return Err(usage(format!("action matrix {i} is not {dim}×{dim}")));
                    }
                    Ok(FpMatrix::from_rows(f, *dim, rows))
                })
                .collect::<Result<_, _>>()?;
            // ρ(s·x) = ρ(x) ρ(s) for right-acting matrices.
            let mut rho: Vec<Option<FpMatrix>> = vec![None; g.order()];
            rho[g.identity()] = Some(FpMatrix::identity(f, *dim));
            let mut queue = vec![g.identity()];
            while let Some(x) = queue.pop() {
                for (s, m) in gens.iter().zip(&mats) {
                    let y = g.mul(*s, x);
                    if rho[y].is_none() {
                        rho[y] = Some(rho[x].as_ref().unwrap() * m);
                        queue.push(y);
                    }
                }
            }
            let action = rho.into_iter().map(|m| m.expect("generators generate")).collect();
            FdModule::new(alg.clone(), *dim, action).map_err(|e| usage(format!("module: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_and_tabled_groups() {
        assert_eq!(parse_group(&GroupSpec::Named("cyclic:6".into())).unwrap().order(), 6);
        assert_eq!(parse_group(&GroupSpec::Named("q8".into())).unwrap().order(), 8);
        assert_eq!(parse_group(&GroupSpec::Cyclic { cyclic: 3 }).unwrap().order(), 3);
        let t = parse_group(&GroupSpec::Table { table: vec![vec![0, 1], vec![1, 0]] }).unwrap();
        assert_eq!(t.order(), 2);
        assert!(parse_group(&GroupSpec::Table { table: vec![vec![0, 1], vec![0, 1]] }).is_err());
        assert!(parse_group(&GroupSpec::Named("cyclic:x".into())).is_err());
    }

    #[test]
    fn toml_descriptor_round_trip() {
        let d: RunDescriptor = toml::from_str("p = 3\ngroup = \"s3\"\nsubgroup = [0, 3, 4]\nmodule = \"regular\"\ndegree = 2\n").unwrap();
        assert_eq!(d.group, Some(GroupSpec::Named("s3".into())));
        let g = d.group().unwrap();
        assert_eq!(d.subgroup(&g).unwrap(), Some(vec![0, 3, 4]));
        let alg = group_alg(&g, d.field().unwrap());
        assert_eq!(d.module(&g, &alg).unwrap().dim(), 6);
        assert!(toml::from_str::<RunDescriptor>("colour = 1").is_err());
    }

    #[test]
    fn explicit_modules_are_validated() {
        let g = GroupTable::cyclic(3);
        let alg = group_alg(&g, FieldSpec::new(3).unwrap());
        let jordan = ModuleSpec::Explicit { dim: 2, action: vec![vec![vec![1, 1], vec![0, 1]]] };
        let m = build_module(&jordan, &g, &alg).unwrap();
        assert_eq!(m.action(2), &FpMatrix::from_rows(alg.field(), 2, &[vec![1, 2], vec![0, 1]]));
        let not_order_three = ModuleSpec::Explicit { dim: 1, action: vec![vec![vec![2]]] };
        assert!(build_module(&not_order_three, &g, &alg).is_err());
        let wrong_shape = ModuleSpec::Explicit { dim: 2, action: vec![vec![vec![1]]] };
        assert!(build_module(&wrong_shape, &g, &alg).is_err());
    }
}
