//! Wire format for instances and norms.
//!
//! An instance document is
//! `{"weights":[..], "scalars":[..] | [[re,im],..], "vectors":[[..],..],
//!   "norm":{"kind":"lp","p":2.0} | {"kind":"linf"} | {"kind":"l1"} |
//!          {"kind":"complex_modulus"} | {"kind":"real_abs"}}`.
//! The space dimension is carried by the vectors themselves; in the complex
//! plane each vector is written as its `[re, im]` pair.

use num_complex::Complex64;
use serde::de::Error as DeError;
use serde::ser::Error as SerError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::space::{Instance, LpExponent, NormDescriptor, Vector};

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NormDoc {
    Lp { p: f64 },
    Linf,
    L1,
    ComplexModulus,
    RealAbs,
}

impl NormDoc {
    fn from_descriptor(nd: &NormDescriptor) -> Self {
        match nd {
            NormDescriptor::RealAbs => NormDoc::RealAbs,
            NormDescriptor::ComplexModulus => NormDoc::ComplexModulus,
            NormDescriptor::LpReal { exponent, .. } => match exponent {
                LpExponent::Infinity => NormDoc::Linf,
                LpExponent::Finite(p) if *p == 1.0 => NormDoc::L1,
                LpExponent::Finite(p) => NormDoc::Lp { p: *p },
            },
        }
    }

    fn into_descriptor(self, dimension: usize) -> Result<NormDescriptor, crate::space::SpaceError> {
        match self {
            NormDoc::Lp { p } => NormDescriptor::lp_real(p, dimension),
            NormDoc::Linf => NormDescriptor::linf_real(dimension),
            NormDoc::L1 => NormDescriptor::lp_real(1.0, dimension),
            NormDoc::ComplexModulus => Ok(NormDescriptor::complex_modulus()),
            NormDoc::RealAbs => Ok(NormDescriptor::real_abs()),
        }
    }
}

impl Serialize for NormDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        NormDoc::from_descriptor(self).serialize(serializer)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarsDoc {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

#[derive(Deserialize)]
struct InstanceDoc {
    weights: Vec<f64>,
    scalars: ScalarsDoc,
    vectors: Vec<Vec<f64>>,
    norm: NormDoc,
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut state = serializer.serialize_struct("Instance", 4)?;
        state.serialize_field("weights", self.weights())?;

        if self.scalars_are_real() {
            let scalars: Vec<f64> = self.scalars().iter().map(|a| a.re).collect();
            state.serialize_field("scalars", &scalars)?;
        } else {
            let scalars: Vec<[f64; 2]> = self.scalars().iter().map(|a| [a.re, a.im]).collect();
            state.serialize_field("scalars", &scalars)?;
        }

        let vectors: Result<Vec<Vec<f64>>, S::Error> = self
            .vectors()
            .iter()
            .map(|v| match self.norm() {
                NormDescriptor::ComplexModulus => {
                    let z = v.coords()[0];
                    Ok(vec![z.re, z.im])
                }
                _ => {
                    if !v.is_real() {
                        return Err(S::Error::custom("real space holds a complex vector"));
                    }
                    Ok(v.coords().iter().map(|z| z.re).collect())
                }
            })
            .collect();
        state.serialize_field("vectors", &vectors?)?;
        state.serialize_field("norm", &NormDoc::from_descriptor(self.norm()))?;
        state.end()
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = InstanceDoc::deserialize(deserializer)?;

        let scalars: Vec<Complex64> = match doc.scalars {
            ScalarsDoc::Real(values) => values
                .into_iter()
                .map(|re| Complex64::new(re, 0.0))
                .collect(),
            ScalarsDoc::Complex(pairs) => pairs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        };

        let (vectors, dimension) = match doc.norm {
            NormDoc::ComplexModulus => {
                let vectors: Result<Vec<Vector>, D::Error> = doc
                    .vectors
                    .iter()
                    .map(|coords| {
                        if coords.len() != 2 {
                            return Err(D::Error::custom(
                                "complex-plane vectors are [re, im] pairs",
                            ));
                        }
                        Ok(Vector::from_complex(vec![Complex64::new(
                            coords[0], coords[1],
                        )]))
                    })
                    .collect();
                (vectors?, 1)
            }
            _ => {
                let dimension = doc.vectors.first().map(|v| v.len()).unwrap_or(1);
                let vectors = doc
                    .vectors
                    .iter()
                    .map(|coords| Vector::from_real(coords))
                    .collect();
                (vectors, dimension)
            }
        };

        let norm = doc
            .norm
            .into_descriptor(dimension)
            .map_err(D::Error::custom)?;
        Instance::new(doc.weights, scalars, vectors, norm).map_err(D::Error::custom)
    }
}
