import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rl1lae.config import apply_overrides, get_preset, list_presets, parse_config, serialize_config
from rl1lae.exceptions import ConfigError
from rl1lae.experiment import ScenarioConfig
from rl1lae.filters import Algorithm, FilterParams


def test_empty_document_gives_defaults():
    c = parse_config("")
    assert c.channel.length_n == 80
    assert c.channel.sparsity_k == 8
    assert c.snr_db == 10.0
    assert c.noise.sigma1_sq == pytest.approx(0.1, rel=1e-15)
    assert c.noise.alpha1 == c.noise.alpha2 == 0.0
    assert c.num_runs == 1000
    assert c.iterations == 3000
    assert set(c.algorithms) == set(Algorithm)
    for p in c.filter_params.values():
        assert p == FilterParams(mu=0.01, lambda_r=1e-4, delta_r=0.01)


def test_snr_sets_sigma1():
    c = parse_config("snr_db = 5")
    assert c.noise.sigma1_sq == pytest.approx(0.316227766, rel=1e-9)


@pytest.mark.parametrize(
    "doc, key",
    [
        ("phi = 1.5", "phi"),
        ("phi = -0.1", "phi"),
        ("mu = 0", "mu"),
        ("delta_r = -1", "delta_r"),
        ("lambda_r = -1e-3", "lambda_r"),
        ("runs = 0", "runs"),
        ("iterations = 2.5", "iterations"),
        ("sparsity = 90", "sparsity"),
        ("sigma1_sq = 0.2", "sigma1_sq"),
        ("bogus = 1", "bogus"),
        ('algorithms = ["LMS", "NLMS"]', "algorithms"),
        ('phi = "high"', "phi"),
        ("rl1_lae_mu = -1", "rl1_lae_mu"),
    ],
)
def test_errors_name_the_key(doc, key):
    with pytest.raises(ConfigError) as info:
        parse_config(doc)
    assert info.value.key == key
    assert key in str(info.value)


def test_malformed_document():
    with pytest.raises(ConfigError):
        parse_config("phi = = 2")


def test_per_algorithm_override():
    c = parse_config("rl1_lae_lambda_r = 0.01\nmu = 0.02")
    assert c.filter_params[Algorithm.RL1_LAE] == FilterParams(mu=0.02, lambda_r=0.01, delta_r=0.01)
    assert c.filter_params[Algorithm.RL1_LMS].lambda_r == 1e-4


def test_algorithm_subset():
    c = parse_config('algorithms = ["rl1-lae", "LMS"]')
    assert c.algorithms == (Algorithm.RL1_LAE, Algorithm.LMS)


def test_round_trip_defaults():
    c = parse_config("")
    assert parse_config(serialize_config(c)) == c


@given(
    n=st.integers(1, 200),
    data=st.data(),
    snr=st.floats(-20, 40, allow_nan=False),
    phi=st.floats(0, 1),
    s2=st.floats(0, 1e3),
    a1=st.floats(-5, 5),
    mu=st.floats(1e-6, 1.0),
    lam=st.floats(0, 1.0),
    delta=st.floats(1e-6, 1.0),
    algs=st.lists(st.sampled_from(list(Algorithm)), min_size=1, max_size=4, unique=True),
    iterations=st.integers(1, 10**6),
    runs=st.integers(1, 10**5),
    seed=st.integers(0, 2**63 - 1),
)
@settings(max_examples=80, deadline=None)
def test_round_trip_property(n, data, snr, phi, s2, a1, mu, lam, delta, algs, iterations, runs, seed):
    k = data.draw(st.integers(1, n))
    params = {a: FilterParams(mu=mu, lambda_r=lam, delta_r=delta) for a in algs}
    params[algs[-1]] = FilterParams(mu=mu * 2, lambda_r=lam, delta_r=delta)
    c = ScenarioConfig.create(
        length_n=n, sparsity_k=k, snr_db=snr, phi=phi, sigma2_sq=s2, alpha1=a1,
        filter_params=params, algorithms=algs, iterations=iterations, num_runs=runs, master_seed=seed,
    )
    assert parse_config(serialize_config(c)) == c


def test_apply_overrides():
    c = apply_overrides(parse_config(""), runs=5, phi=0.4)
    assert c.num_runs == 5 and c.noise.phi == 0.4
    with pytest.raises(ConfigError):
        apply_overrides(c, phi=2.0)


class TestPresets:
    def test_catalog(self):
        assert list(list_presets()) == ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"]

    @pytest.mark.parametrize(
        "name, k, phi, s2",
        [("fig2", 8, 0.2, 20.0), ("fig3", 8, 0.2, 40.0), ("fig4", 4, 0.2, 40.0), ("fig5", 8, 0.2, 80.0)],
    )
    def test_caption_values(self, name, k, phi, s2):
        c = get_preset(name).config
        assert (c.channel.sparsity_k, c.noise.phi, c.noise.sigma2_sq, c.snr_db) == (k, phi, s2, 10.0)
        assert c.channel.length_n == 80

    def test_fig1_is_gaussian(self):
        c = get_preset("fig1").config
        assert c.noise.phi == 0.0
        assert (c.channel.sparsity_k, c.snr_db) == (8, 10.0)

    def test_fig4_differs_from_fig3_only_in_k(self):
        fig3, fig4 = get_preset("fig3").config, get_preset("fig4").config
        assert fig4 == apply_overrides(fig3, sparsity=4)

    def test_fig6_sweep(self):
        preset = get_preset("fig6")
        points = preset.configs()
        assert [v for v, _ in points] == [0.0, 0.1, 0.2, 0.4]
        for value, c in points:
            assert c.noise.phi == value
            assert (c.channel.sparsity_k, c.noise.sigma2_sq, c.snr_db) == (8, 40.0, 10.0)
        assert points[2][1] == get_preset("fig3").config
        assert points[0][1] == get_preset("fig1").config

    def test_table_parameters(self):
        for preset in list_presets().values():
            for p in preset.config.filter_params.values():
                assert p == FilterParams(mu=0.01, lambda_r=1e-4, delta_r=0.01)

    def test_unknown(self):
        with pytest.raises(ConfigError):
            get_preset("fig9")
