use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gan::GanModel;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct EnvelopeOut<'a> {
    format_version: u32,
    model: &'a GanModel,
}

#[derive(Deserialize)]
struct Header {
    format_version: u32,
}

#[derive(Deserialize)]
struct EnvelopeIn {
    model: GanModel,
}

fn serde_err(e: serde_json::Error) -> Error {
    Error::Serde(e.to_string())
}

pub fn write_model<W: Write>(model: &GanModel, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    serde_json::to_writer(
        &mut w,
        &EnvelopeOut {
            format_version: MODEL_FORMAT_VERSION,
            model,
        },
    )
    .map_err(serde_err)?;
    w.flush()?;
    Ok(())
}

pub fn read_model<R: Read>(mut reader: R) -> Result<GanModel> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let header: Header = serde_json::from_str(&text).map_err(serde_err)?;
    if header.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Version {
            found: header.format_version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let env: EnvelopeIn = serde_json::from_str(&text).map_err(serde_err)?;
    let m = env.model;
    // Re-run the structural checks so a hand-edited file cannot produce a
    // model whose layers disagree.
    let mut checked = GanModel::from_parts(m.generator, m.discriminator, m.standardizer, m.names)?;
    if checked.noise_dim != m.noise_dim {
        return Err(Error::Dimension {
            context: "model noise_dim",
            expected: checked.noise_dim,
            actual: m.noise_dim,
        });
    }
    checked.nonnegative = m.nonnegative;
    checked.trace = m.trace;
    Ok(checked)
}

pub fn save_model(model: &GanModel, path: impl AsRef<Path>) -> Result<()> {
    write_model(model, File::create(path)?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GanModel> {
    read_model(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gan::{sample, train_gan, GanConfig};
    use crate::Dataset;

    fn tiny_model() -> GanModel {
        let data = Dataset::from_rows(
            &(0..40)
                .map(|i| vec![i as f64 * 0.1, 1.0 - i as f64 * 0.05])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let cfg = GanConfig {
            max_epochs: 3,
            generator_hidden: vec![5],
            discriminator_hidden: vec![5],
            ..GanConfig::default()
        };
        train_gan(&data, &cfg).unwrap()
    }

    #[test]
    fn round_trip_preserves_sampling() {
        let m = tiny_model();
        let mut buf = Vec::new();
        write_model(&m, &mut buf).unwrap();
        let back = read_model(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        assert_eq!(sample(&back, 50, 9).unwrap(), sample(&m, 50, 9).unwrap());
        assert_eq!(back.generator.layer_dims(), m.generator.layer_dims());
    }

    #[test]
    fn truncated_and_wrong_version_rejected() {
        let m = tiny_model();
        let mut buf = Vec::new();
        write_model(&m, &mut buf).unwrap();
        let cut = &buf[..buf.len() / 2];
        assert!(matches!(read_model(cut), Err(Error::Serde(_))));
        let text = String::from_utf8(buf).unwrap().replacen(
            "\"format_version\":1",
            "\"format_version\":7",
            1,
        );
        assert!(matches!(
            read_model(text.as_bytes()),
            Err(Error::Version {
                found: 7,
                expected: 1
            })
        ));
    }
}
