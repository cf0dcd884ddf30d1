use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use asch::graph::{
    gen_communities, gen_fixture, gen_gnp, gen_grid, gen_random_tree, gen_star, sample_opinions, CommunitiesConfig,
    FixtureSpec, OpinionDistribution, OpinionInstance, UndirectedGraph,
};
use asch::io::{self, DatasetBundle, OpinionScale};

use crate::args::{Dist, InstanceArgs, Model, Scale};

pub struct Loaded {
    pub instance: OpinionInstance,
    /// Short label for the results CSV.
    pub dataset: String,
    pub graph: Option<UndirectedGraph>,
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
}

fn distribution(dist: Dist) -> OpinionDistribution {
    match dist {
        Dist::ClippedNormal => OpinionDistribution::default(),
        Dist::Uniform => OpinionDistribution::Uniform { low: 0.0, high: 1.0 },
        // Same variance as the uniform distribution: 1/rate^2 = 1/12.
        Dist::Exponential => OpinionDistribution::Exponential { rate: 12f64.sqrt() },
    }
}

pub fn load(args: &InstanceArgs, seed: u64) -> Result<Loaded> {
    if let Some(path) = &args.instance {
        let instance = io::load_instance(path).with_context(|| format!("loading instance {}", path.display()))?;
        return Ok(Loaded { instance, dataset: stem(path), graph: None });
    }
    if let Some(edges) = &args.edges {
        let opinions = args.opinions.as_ref().expect("clap enforces --opinions with --edges");
        let scale = match args.scale {
            Scale::Unit => OpinionScale::Unit,
            Scale::ZeroTen => OpinionScale::ZeroTen,
        };
        let bundle = DatasetBundle::load(edges, opinions, scale, args.tweets.as_deref())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instance = bundle.to_instance(args.alpha, &mut rng)?;
        return Ok(Loaded {
            instance,
            dataset: stem(edges),
            graph: Some(bundle.graph),
        });
    }
    let Some(model) = args.model else {
        bail!(crate::UsageError("one of --instance, --edges or --model is required".into()));
    };
    let (graph, dataset) = match model {
        Model::Gnp => (gen_gnp(args.n, args.p, seed)?, format!("gnp_n{}_p{}", args.n, args.p)),
        Model::Communities => (gen_communities(&CommunitiesConfig::default(), seed)?, "communities".into()),
        Model::Tree => (gen_random_tree(args.n, seed)?, format!("tree_n{}", args.n)),
        Model::Star => (gen_star(args.leaves)?, format!("star_l{}", args.leaves)),
        Model::Grid => (gen_grid(args.rows, args.cols)?, format!("grid_{}x{}", args.rows, args.cols)),
        Model::Lollipop | Model::Nonsubmod => {
            let (spec, dataset) = if model == Model::Lollipop {
                (FixtureSpec::Lollipop { clique: args.clique, path: args.path }, format!("lollipop_{}_{}", args.clique, args.path))
            } else {
                (FixtureSpec::NonSubmodular { size: args.size, beta: args.beta }, format!("nonsubmod_{}_{}", args.size, args.beta))
            };
            let f = gen_fixture(&spec)?;
            return Ok(Loaded { instance: f.instance, dataset, graph: f.graph });
        }
    };
    let opinions = sample_opinions(graph.node_count(), &distribution(args.dist), seed)?;
    let instance = OpinionInstance::uniform(&graph, args.alpha, opinions)?;
    Ok(Loaded { instance, dataset, graph: Some(graph) })
}
