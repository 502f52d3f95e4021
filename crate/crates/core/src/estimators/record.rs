use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Per-replicate status flags.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RecordFlags {
    /// Sampling or solving failed; the observation carries no values.
    pub failed: bool,
    /// The geodesic entered the outer shell of the sample box.
    pub touched_boundary: bool,
    /// The empty-ball diagnostic exceeded psi(n)^(1/alpha) on the scanned
    /// corridor.
    pub f_n_violated: bool,
}

impl RecordFlags {
    pub fn as_strings(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.failed {
            out.push("failed");
        }
        if self.touched_boundary {
            out.push("touched_boundary");
        }
        if self.f_n_violated {
            out.push("f_n_violated");
        }
        out
    }

    pub fn from_strings<'a>(names: impl Iterator<Item = &'a str>) -> Result<Self, String> {
        let mut flags = RecordFlags::default();
        for name in names {
            match name {
                "failed" => flags.failed = true,
                "touched_boundary" => flags.touched_boundary = true,
                "f_n_violated" => flags.f_n_violated = true,
                other => return Err(format!("unknown flag {other:?}")),
            }
        }
        Ok(flags)
    }
}

/// One Monte Carlo observation, keyed by (n, replicate_index, seed).
///
/// The JSON shape is pinned: one object per line with fields exactly
/// {n, replicate_index, seed, t_n, wandering, slab, flags}, where `slab`
/// maps the slab level (shortest round-trip decimal) to the deviation or
/// null when the geodesic missed the slab.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateRecord {
    pub n: u64,
    pub replicate_index: u64,
    pub seed: u64,
    pub t_n: Option<f64>,
    pub wandering: Option<f64>,
    /// (lambda, deviation) sorted by lambda.
    pub slab: Vec<(f64, Option<f64>)>,
    pub flags: RecordFlags,
}

impl ReplicateRecord {
    /// True when the record carries a usable observation for statistics
    /// unrelated to boundary effects.
    pub fn usable(&self) -> bool {
        !self.flags.failed && self.t_n.is_some()
    }

    /// True when the record should enter spatial statistics: usable and
    /// not suspected of boundary bias.
    pub fn unbiased(&self) -> bool {
        self.usable() && !self.flags.touched_boundary
    }

    pub fn sort_key(&self) -> (u64, u64) {
        (self.n, self.replicate_index)
    }
}

struct SlabMap<'a>(&'a [(f64, Option<f64>)]);

impl Serialize for SlabMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (lambda, value) in self.0 {
            map.serialize_entry(&format!("{lambda}"), value)?;
        }
        map.end()
    }
}

impl Serialize for ReplicateRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ReplicateRecord", 7)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("replicate_index", &self.replicate_index)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("t_n", &self.t_n)?;
        st.serialize_field("wandering", &self.wandering)?;
        st.serialize_field("slab", &SlabMap(&self.slab))?;
        st.serialize_field("flags", &self.flags.as_strings())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ReplicateRecord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RecordVisitor;

        impl<'de> Visitor<'de> for RecordVisitor {
            type Value = ReplicateRecord;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a replicate record object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut n = None;
                let mut replicate_index = None;
                let mut seed = None;
                let mut t_n: Option<Option<f64>> = None;
                let mut wandering: Option<Option<f64>> = None;
                let mut slab: Option<Vec<(f64, Option<f64>)>> = None;
                let mut flags = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "n" => n = Some(map.next_value::<u64>()?),
                        "replicate_index" => replicate_index = Some(map.next_value::<u64>()?),
                        "seed" => seed = Some(map.next_value::<u64>()?),
                        "t_n" => t_n = Some(map.next_value()?),
                        "wandering" => wandering = Some(map.next_value()?),
                        "slab" => {
                            let raw: Vec<(String, Option<f64>)> = map
                                .next_value::<std::collections::BTreeMap<String, Option<f64>>>()?
                                .into_iter()
                                .collect();
                            let mut parsed = Vec::with_capacity(raw.len());
                            for (key, value) in raw {
                                let lambda: f64 = key.parse().map_err(|_| {
                                    serde::de::Error::custom(format!("bad slab level {key:?}"))
                                })?;
                                parsed.push((lambda, value));
                            }
                            parsed.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite levels"));
                            slab = Some(parsed);
                        }
                        "flags" => {
                            let names: Vec<String> = map.next_value()?;
                            flags = Some(
                                RecordFlags::from_strings(names.iter().map(|s| s.as_str()))
                                    .map_err(serde::de::Error::custom)?,
                            );
                        }
                        other => {
                            return Err(serde::de::Error::unknown_field(
                                other,
                                &[
                                    "n",
                                    "replicate_index",
                                    "seed",
                                    "t_n",
                                    "wandering",
                                    "slab",
                                    "flags",
                                ],
                            ))
                        }
                    }
                }
                Ok(ReplicateRecord {
                    n: n.ok_or_else(|| serde::de::Error::missing_field("n"))?,
                    replicate_index: replicate_index
                        .ok_or_else(|| serde::de::Error::missing_field("replicate_index"))?,
                    seed: seed.ok_or_else(|| serde::de::Error::missing_field("seed"))?,
                    t_n: t_n.ok_or_else(|| serde::de::Error::missing_field("t_n"))?,
                    wandering: wandering
                        .ok_or_else(|| serde::de::Error::missing_field("wandering"))?,
                    slab: slab.ok_or_else(|| serde::de::Error::missing_field("slab"))?,
                    flags: flags.ok_or_else(|| serde::de::Error::missing_field("flags"))?,
                })
            }
        }

        deserializer.deserialize_map(RecordVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> ReplicateRecord {
        ReplicateRecord {
            n: 64,
            replicate_index: 3,
            seed: 0xdead_beef_1234_5678,
            t_n: Some(71.25),
            wandering: Some(4.5),
            slab: vec![(1.8125, Some(2.25)), (32.0, None), (62.1875, Some(0.5))],
            flags: RecordFlags {
                failed: false,
                touched_boundary: true,
                f_n_violated: false,
            },
        }
    }

    #[test]
    fn json_shape_is_pinned() {
        let json = serde_json::to_string(&sample_record()).unwrap();
        assert_eq!(
            json,
            r#"{"n":64,"replicate_index":3,"seed":16045690981402826360,"t_n":71.25,"wandering":4.5,"slab":{"1.8125":2.25,"32":null,"62.1875":0.5},"flags":["touched_boundary"]}"#
        );
    }

    #[test]
    fn round_trip_identity() {
        let rec = sample_record();
        let json = serde_json::to_string(&rec).unwrap();
        let back: ReplicateRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(rec, back);
    }

    #[test]
    fn failed_record_round_trips_nulls() {
        let rec = ReplicateRecord {
            n: 16,
            replicate_index: 0,
            seed: 7,
            t_n: None,
            wandering: None,
            slab: vec![],
            flags: RecordFlags {
                failed: true,
                ..Default::default()
            },
        };
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains(r#""t_n":null"#));
        assert!(json.contains(r#""flags":["failed"]"#));
        let back: ReplicateRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(rec, back);
    }

    #[test]
    fn unknown_flag_rejected() {
        let json = r#"{"n":1,"replicate_index":0,"seed":1,"t_n":null,"wandering":null,"slab":{},"flags":["bogus"]}"#;
        assert!(serde_json::from_str::<ReplicateRecord>(json).is_err());
    }
}
