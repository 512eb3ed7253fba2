//! Built-in scenarios, stored as config text so they go through the same parser.

pub const PRESETS: &[(&str, &str)] = &[
    (
        "uz-linear-gaussian",
        "model=uz gamma=0.5 cutoff=0.2
         dim=1 nx=128 nxi=128 lx=13 lxi=8
         dt=0.015625 t_end=1 nonlinear=false
         init=gaussian mass=1 sigma_x=1 sigma_xi=1",
    ),
    (
        "uz-nonlinear-gaussian",
        "model=uz gamma=0.5 cutoff=0.2
         dim=1 nx=128 nxi=128 lx=13 lxi=8
         dt=0.015625 t_end=1 nonlinear=true coupling=1
         init=gaussian mass=1 sigma_x=1 sigma_xi=1",
    ),
    (
        "uz-nonlinear-2d",
        "model=uz gamma=0.5 cutoff=0.2
         dim=2 nx=32 nxi=32 lx=13 lxi=8
         dt=0.0625 t_end=0.5 nonlinear=true coupling=1
         init=gaussian mass=1 sigma_x=1.5 sigma_xi=1",
    ),
    (
        "hpz-linear-gaussian",
        "model=hpz delta=1 cutoff=0.1 beta=0.5 omega=0.05
         dim=1 nx=64 nxi=64 lx=13 lxi=8
         dt=0.0625 t_end=1 nonlinear=false
         init=gaussian mass=1 sigma_x=1 sigma_xi=1",
    ),
    (
        "hpz-nonlinear-horizon",
        "model=hpz delta=1 cutoff=0.1 beta=0.5 omega=0.05
         dim=1 nx=64 nxi=64 lx=13 lxi=8
         dt=0.0625 t_end=4 nonlinear=true
         init=gaussian mass=1 sigma_x=1 sigma_xi=1",
    ),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}
