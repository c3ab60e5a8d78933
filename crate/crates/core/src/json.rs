//! JSON encoding of tables.
//!
//! ```json
//! {"outputs":[{"name":"x","symbols":["0","1"]}],
//!  "inputs":[{"name":"a","symbols":["0","1"]}],
//!  "entries":{"x=0|a=0":"1/2","x=1|a=0":"1/2","x=0|a=1":"1/1"}}
//! ```
//!
//! Keys list every output assignment, then `|`, then every input assignment
//! (the `|` may be omitted when there are no inputs). Assignments within a
//! side may come in any order. Missing cells are zero; values are exact
//! `"num/den"` strings.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational;
use crate::table::{Alphabet, CondTable, Radix};

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub(crate) struct AlphabetJson {
    name: String,
    symbols: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub(crate) struct TableJson {
    outputs: Vec<AlphabetJson>,
    #[serde(default)]
    inputs: Vec<AlphabetJson>,
    #[serde(default)]
    entries: BTreeMap<String, String>,
}

pub(crate) fn alphabet_from_json(a: AlphabetJson) -> Result<Alphabet> {
    Alphabet::new(a.name, a.symbols)
}

pub(crate) fn alphabet_to_json(a: &Alphabet) -> AlphabetJson {
    AlphabetJson {
        name: a.name().to_string(),
        symbols: a.symbols().to_vec(),
    }
}

/// Parses one side of a key (`x=0,y=1`) into a tuple over `alphabets`.
pub(crate) fn parse_assignment(side: &str, alphabets: &[Alphabet]) -> Result<Vec<usize>> {
    let mut tuple: Vec<Option<usize>> = vec![None; alphabets.len()];
    if !side.is_empty() {
        for part in side.split(',') {
            let (name, sym) = part
                .split_once('=')
                .ok_or_else(|| Error::Json(format!("malformed assignment {part:?}")))?;
            let p = alphabets
                .iter()
                .position(|a| a.name() == name)
                .ok_or_else(|| Error::UnknownAlphabet(name.to_string()))?;
            let s = alphabets[p].index_of(sym).ok_or_else(|| Error::UnknownSymbol {
                alphabet: name.to_string(),
                symbol: sym.to_string(),
            })?;
            if tuple[p].replace(s).is_some() {
                return Err(Error::Json(format!("{name:?} assigned twice")));
            }
        }
    }
    tuple
        .into_iter()
        .zip(alphabets)
        .map(|(t, a)| t.ok_or_else(|| Error::Json(format!("{:?} not assigned", a.name()))))
        .collect()
}

pub(crate) fn key(outputs: &[Alphabet], o: &[usize], inputs: &[Alphabet], i: &[usize]) -> String {
    let out = crate::table::label(outputs, o);
    if inputs.is_empty() {
        out
    } else {
        format!("{out}|{}", crate::table::label(inputs, i))
    }
}

impl TryFrom<TableJson> for CondTable {
    type Error = Error;

    fn try_from(j: TableJson) -> Result<Self> {
        let outputs = j
            .outputs
            .into_iter()
            .map(alphabet_from_json)
            .collect::<Result<Vec<_>>>()?;
        let inputs = j
            .inputs
            .into_iter()
            .map(alphabet_from_json)
            .collect::<Result<Vec<_>>>()?;
        let out_radix = Radix::new(outputs.iter().map(Alphabet::len).collect())?;
        let in_radix = Radix::new(inputs.iter().map(Alphabet::len).collect())?;
        let cells = out_radix
            .len()
            .checked_mul(in_radix.len())
            .filter(|&c| c <= crate::table::MAX_CELLS)
            .ok_or_else(|| Error::ShapeMismatch("table too large".into()))?;
        if j.entries.len() > cells {
            return Err(Error::Json("more entries than cells".into()));
        }
        let mut entries: Vec<Option<rational::Rational>> = vec![None; cells];
        for (k, v) in j.entries {
            let (out_side, in_side) = k.split_once('|').unwrap_or((k.as_str(), ""));
            let o = out_radix.encode(&parse_assignment(out_side, &outputs)?);
            let i = in_radix.encode(&parse_assignment(in_side, &inputs)?);
            let cell = &mut entries[i * out_radix.len() + o];
            if cell.replace(rational::parse(&v)?).is_some() {
                return Err(Error::Json(format!("cell {k:?} given twice")));
            }
        }
        let entries = entries.into_iter().map(Option::unwrap_or_default).collect();
        CondTable::new(outputs, inputs, entries)
    }
}

impl From<&CondTable> for TableJson {
    fn from(t: &CondTable) -> Self {
        let mut entries = BTreeMap::new();
        for (i, o, v) in t.nonzero() {
            let k = key(
                t.outputs(),
                &t.out_radix().decode(o),
                t.inputs(),
                &t.in_radix().decode(i),
            );
            entries.insert(k, rational::format(v));
        }
        TableJson {
            outputs: t.outputs().iter().map(alphabet_to_json).collect(),
            inputs: t.inputs().iter().map(alphabet_to_json).collect(),
            entries,
        }
    }
}

impl Serialize for CondTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CondTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TableJson::deserialize(d)?;
        CondTable::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl CondTable {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables always serialize")
    }
}

/// Zero cells are omitted on output; this helper is exposed for callers that
/// want to check sparsity of an emitted table.
pub fn nonzero_cells(t: &CondTable) -> usize {
    t.entries().iter().filter(|v| !v.is_zero()).count()
}
