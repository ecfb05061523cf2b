use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use thetapi::spaces::{
    default_earring_samples, gen_annulus, gen_circle, gen_circle_product, gen_circle_tree, gen_hawaiian_earring,
    gen_hawaiian_window, gen_sine_space, gen_telescope, write_matrix_csv, write_points_csv, FiniteMetricSpace,
    Sidecar, SineVariant, CIRCLE_PRODUCT_CAP, DEFAULT_SPACING,
};

use crate::io::sidecar_path;
use crate::{Ctx, Failure};

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(subcommand)]
    space: Space,
    /// Point CSV; a `.meta.json` sidecar is written next to it.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Write the distance matrix instead of coordinates.
    #[arg(long, global = true)]
    matrix: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Variant {
    Flat,
    ThreeSquares,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::enum_variant_names)]
enum Space {
    /// Equally spaced points on a circle.
    Circle {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        count: usize,
        /// Comma-separated centre, at least two coordinates.
        #[arg(long, value_delimiter = ',', default_value = "0,0")]
        center: Vec<f64>,
    },
    /// Circles of radius 1/n through the origin.
    HawaiianEarring {
        #[arg(long)]
        n_circles: usize,
        /// Per-circle sample counts; defaults follow the spacing.
        #[arg(long, value_delimiter = ',')]
        samples: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_SPACING)]
        spacing: f64,
    },
    /// Shrinking cylinders with octagons inside.
    Telescope {
        #[arg(long)]
        stages: usize,
        #[arg(long, default_value_t = 16)]
        samples_per_ring: usize,
        #[arg(long)]
        no_spokes: bool,
    },
    /// l1 product of circles of radii 1, 1/2, 1/4, ...
    CircleProduct {
        #[arg(long)]
        factors: usize,
        #[arg(long, value_delimiter = ',')]
        samples: Vec<usize>,
        #[arg(long, default_value_t = CIRCLE_PRODUCT_CAP)]
        cap: usize,
    },
    /// Square with nested central crosses.
    HawaiianWindow {
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_SPACING)]
        spacing: f64,
    },
    /// Topologist's sine curve variants.
    SineSpace {
        #[arg(long, value_enum, default_value = "flat")]
        variant: Variant,
        #[arg(long, default_value_t = DEFAULT_SPACING)]
        resolution: f64,
    },
    Annulus {
        #[arg(long)]
        r_in: f64,
        #[arg(long)]
        r_out: f64,
        #[arg(long, default_value_t = DEFAULT_SPACING)]
        spacing: f64,
    },
    /// Binary tree of shrinking circles.
    CircleTree {
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value_t = DEFAULT_SPACING)]
        spacing: f64,
    },
}

fn build(space: Space) -> thetapi::Result<FiniteMetricSpace> {
    match space {
        Space::Circle { radius, count, center } => gen_circle(radius, count, &center),
        Space::HawaiianEarring { n_circles, samples, spacing } => {
            let samples = samples.unwrap_or_else(|| default_earring_samples(n_circles, spacing));
            gen_hawaiian_earring(n_circles, &samples)
        }
        Space::Telescope { stages, samples_per_ring, no_spokes } => gen_telescope(stages, samples_per_ring, !no_spokes),
        Space::CircleProduct { factors, samples, cap } => gen_circle_product(factors, &samples, cap),
        Space::HawaiianWindow { depth, spacing } => gen_hawaiian_window(depth, spacing),
        Space::SineSpace { variant, resolution } => {
            let v = match variant {
                Variant::Flat => SineVariant::Flat,
                Variant::ThreeSquares => SineVariant::ThreeSquares,
            };
            gen_sine_space(v, resolution)
        }
        Space::Annulus { r_in, r_out, spacing } => gen_annulus(r_in, r_out, spacing),
        Space::CircleTree { levels, spacing } => gen_circle_tree(levels, spacing),
    }
}

pub fn run(ctx: &mut Ctx, args: GenArgs) -> Result<u8, Failure> {
    let space = build(args.space)?;
    ctx.note(format!("{} points from {}", space.len(), space.info().generator));
    let mut buf = Vec::new();
    if args.matrix {
        write_matrix_csv(&space, &mut buf)?;
    } else {
        write_points_csv(&space, &mut buf)?;
    }
    let text = String::from_utf8(buf).map_err(|e| Failure::internal(e.to_string()))?;
    ctx.outputs.emit(args.output.as_deref(), &text)?;
    if let Some(p) = &args.output {
        let sidecar = crate::io::to_value(&Sidecar::of(&space))?;
        ctx.outputs.emit_json(Some(&sidecar_path(p)), &sidecar)?;
    }
    Ok(0)
}
