//! PNG output of block renders.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use gridly_core::env::{Environment, Observation, ObserverKind, PlayerAction};
use gridly_core::observers::PixelObservation;

use crate::Error;

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn encode_png(image: &PixelObservation) -> Result<Vec<u8>, Error> {
    let mut bytes = Vec::new();
    let mut encoder = png::Encoder::new(&mut bytes, image.width, image.height);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&image.data)?;
    writer.finish()?;
    Ok(bytes)
}

pub fn write_png(path: &Path, image: &PixelObservation) -> Result<(), Error> {
    let file = File::create(path).map_err(io(path))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), image.width, image.height);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&image.data)?;
    writer.finish()?;
    Ok(())
}

/// Writes the global block view after reset and after each of `steps`
/// random steps as `frame_NNNNN.png` in `dir`. Stops early at a terminal step.
pub fn record(env: &mut Environment, steps: u64, dir: &Path) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut frame = Observation::Block(PixelObservation::default());
    let mut written = Vec::new();
    let mut save = |env: &Environment, index: u64| -> Result<(), Error> {
        env.global_observe_into(&mut frame);
        let path = dir.join(format!("frame_{index:05}.png"));
        write_png(&path, frame.as_block().expect("block observation"))?;
        written.push(path);
        Ok(())
    };
    save(env, 0)?;
    let mut actions = vec![PlayerAction::NoOp; env.player_count() as usize];
    for i in 1..=steps {
        for (p, a) in actions.iter_mut().enumerate() {
            *a = env.sample_action(p as u32 + 1);
        }
        let result = env.step(&actions)?;
        save(env, i)?;
        if result.terminated {
            break;
        }
    }
    debug_assert!(env.global_observe(ObserverKind::Block).as_block().is_some());
    Ok(written)
}
