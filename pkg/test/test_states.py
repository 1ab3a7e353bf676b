import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from modules.fock.operator import identity_operator
from modules.fock.space import FockSpace
from modules.lang.ast import SpaceSpec
from modules.oracles.closed_forms import (bosonic_position, bosonic_trace_series, coherent_weight_series,
                                          published_bosonic_trace)
from modules.states.fock_state import (FockState, annihilation_op, apply_operator, basis_state, coherent_state,
                                       creation_op, principal_basis_vector, tensor_principal, vacuum)
from modules.states.principal import (PartialDensityOperator, distribution_frame, distribution_json,
                                      parse_coin_init, partial_trace_coins, run_principal)
from modules.symmetry.symmetrise import BOSON, FERMION, symmetric_projection
from modules.utils.errors import FockrecError, SpaceMismatchError, StatisticsError

E_L = np.array([1.0, 0.0])
E_R = np.array([0.0, 1.0])


@pytest.fixture
def walk_space():
    return FockSpace.build([SpaceSpec.coin("d", ["L", "R"]), SpaceSpec.ring_system("p", 4)], 3)


# ----------------------------------------------------------------- estados de base
def test_basis_state_is_normalised(walk_space):
    state = basis_state(walk_space, "d", ["L", "R"])

    assert state.norm_squared() == pytest.approx(1.0)
    assert np.allclose(state.component(walk_space.occ(d=2)), np.array([0, 1, 1, 0]) / np.sqrt(2))
    assert state.is_symmetric()


def test_fermionic_basis_state(walk_space):
    state = basis_state(walk_space, "d", ["L", "R"], statistics="fermion")

    assert np.allclose(state.component(walk_space.occ(d=2)), np.array([0, 1, -1, 0]) / np.sqrt(2))

    with pytest.raises(StatisticsError) as excinfo:
        basis_state(walk_space, "d", ["L", "L"], statistics="fermion")
    assert "Pauli" in str(excinfo.value)


def test_basis_state_above_truncation(walk_space):
    with pytest.raises(FockrecError):
        basis_state(walk_space, "d", ["L"] * 4)


# ----------------------------------------------------------------- criação e aniquilação
def test_creation_and_annihilation(walk_space):
    one = creation_op(E_L, vacuum(walk_space), "d")
    two = creation_op(E_L, one, "d")

    assert np.allclose(one.component(walk_space.occ(d=1)), E_L)
    assert np.allclose(two.component(walk_space.occ(d=2)), np.sqrt(2) * np.array([1, 0, 0, 0]))

    back = annihilation_op(E_L, two, "d")
    assert np.allclose(back.component(walk_space.occ(d=1)), 2 * E_L)
    assert annihilation_op(E_L, vacuum(walk_space), "d").norm_squared() == 0


def test_fermionic_creation_twice_vanishes(walk_space):
    one = creation_op(E_L, vacuum(walk_space, "fermion"), "d")

    assert creation_op(E_L, one, "d").norm_squared() == pytest.approx(0.0)
    assert creation_op(E_R, one, "d").norm_squared() == pytest.approx(1.0)


def test_creation_above_truncation_is_reported():
    space = FockSpace.build([SpaceSpec.coin("d", ["L", "R"])], 1)
    one = creation_op(E_L, vacuum(space), "d")

    two = creation_op(E_L, one, "d")

    assert not two.components
    assert two.truncation_loss == pytest.approx(2.0)


def test_creation_rejects_wrong_dimension(walk_space):
    with pytest.raises(SpaceMismatchError):
        creation_op(np.ones(3), vacuum(walk_space), "d")


# ----------------------------------------------------------------- estados coerentes
def test_coherent_state_tail(walk_space):
    state = coherent_state(E_L, "d", walk_space, cap=3)

    assert state.truncation_loss == pytest.approx(float(special.gammainc(4, 1.0)))
    assert state.norm_squared() + state.truncation_loss == pytest.approx(1.0)
    assert state.component(walk_space.occ(d=3))[0] == pytest.approx(np.exp(-0.5) / np.sqrt(6))
    assert state.is_symmetric()


def test_coherent_cap_above_truncation_is_reduced(mocker, walk_space):
    logger = mocker.patch("modules.states.fock_state.logger")

    state = coherent_state(E_L, "d", walk_space, cap=12)

    logger.warning.assert_called_once()
    assert "N = 12" in logger.warning.call_args[0][0]
    assert state.truncation_loss == pytest.approx(float(special.gammainc(4, 1.0)))


def test_coherent_state_needs_bosons(walk_space):
    with pytest.raises(StatisticsError):
        coherent_state(E_L, "d", walk_space, statistics="fermion")


# ----------------------------------------------------------------- traço parcial
def test_partial_trace_of_product_state(walk_space):
    phi = principal_basis_vector(walk_space, "1")
    state = tensor_principal(basis_state(walk_space, "d", ["L", "R"]), phi)

    rho = partial_trace_coins(state)

    assert rho.trace == pytest.approx(1.0)
    assert rho.support() == ["1"]


def test_partial_trace_needs_principal(walk_space):
    with pytest.raises(SpaceMismatchError):
        partial_trace_coins(vacuum(walk_space))
    with pytest.raises(SpaceMismatchError):
        tensor_principal(tensor_principal(vacuum(walk_space), principal_basis_vector(walk_space, "0")),
                         principal_basis_vector(walk_space, "0"))


def test_principal_basis_vector_position(walk_space):
    vec = principal_basis_vector(walk_space, "0")

    assert vec.shape == (9,)
    assert vec[4] == 1


def test_density_operator_validation():
    with pytest.raises(FockrecError):
        PartialDensityOperator(np.diag([0.8, 0.4]), ("a", "b")).validate()
    with pytest.raises(FockrecError):
        PartialDensityOperator(np.diag([0.5, -0.1]), ("a", "b")).validate()


def test_distribution_outputs():
    rho = PartialDensityOperator(np.diag([0.25, 0.0, 0.5]), ("-1", "0", "1"))

    frame = distribution_frame(rho)
    dump = distribution_json(rho)

    assert list(frame.columns) == ["position", "probability"]
    assert list(frame["position"]) == ["-1", "1"]
    assert dump == {"trace": pytest.approx(0.75), "probs": {"-1": 0.25, "1": 0.5}}


# ----------------------------------------------------------------- inicialização das moedas
def test_parse_coin_init(walk_space):
    assert parse_coin_init("vacuum", walk_space).components.keys() == {walk_space.vacuum}
    assert parse_coin_init("basis:L,R", walk_space).norm_squared() == pytest.approx(1.0)
    assert parse_coin_init("coherent:R@2", walk_space).truncation_loss == pytest.approx(
        float(special.gammainc(3, 1.0)))


@pytest.mark.parametrize("spec", ["bogus", "basis:", "coherent", "vacuum:L"])
def test_parse_coin_init_rejects(walk_space, spec):
    with pytest.raises(ValueError):
        parse_coin_init(spec, walk_space)


def test_parse_coin_init_unknown_label(walk_space):
    with pytest.raises(ValueError) as excinfo:
        parse_coin_init("basis:L,U", walk_space)
    assert "U" in str(excinfo.value)


# ----------------------------------------------------------------- caminhada bidirecional com bósons
@pytest.mark.parametrize("n", [1, 2, 3])
def test_bosonic_initialisation(load_walk, cfg, n):
    """n bósons em |L⟩: suporte único em −1 (n ímpar) ou 2 (n par), traço 1/(2^n · m_n)."""
    program, space = load_walk("ddrhw", trunc=4)

    rho = run_principal(program.declaration, space, program.gates, "basis:" + ",".join(["L"] * n), "0", cfg=cfg)

    assert rho.support() == [bosonic_position(n)]
    assert rho.trace == pytest.approx(bosonic_trace_series(n))


def test_bosonic_trace_deviates_from_published_series_at_three():
    assert bosonic_trace_series(1) == published_bosonic_trace(1)
    assert bosonic_trace_series(2) == published_bosonic_trace(2)
    assert bosonic_trace_series(3) == pytest.approx(published_bosonic_trace(3) / 3)


def test_coherent_initialisation(load_walk, cfg):
    program, space = load_walk("ddrhw", trunc=4)
    expected = coherent_weight_series(3)

    rho = run_principal(program.declaration, space, program.gates, "coherent:L@3", "0", cfg=cfg)
    probs = distribution_json(rho)["probs"]

    assert set(probs) == {"-1", "2"}
    assert probs["-1"] == pytest.approx(expected["-1"])
    assert probs["2"] == pytest.approx(expected["2"])
    assert rho.trace == pytest.approx(expected["trace"])
    assert probs["-1"] / probs["2"] == pytest.approx(expected["ratio"])


def test_coherent_series_ratio_converges():
    assert coherent_weight_series(12)["ratio"] == pytest.approx(4.035, abs=2e-3)


# ----------------------------------------------------------------- produto interno e aplicação de operadores
def test_inner_product(walk_space):
    lr = basis_state(walk_space, "d", ["L", "R"])
    ll = basis_state(walk_space, "d", ["L", "L"])

    assert lr.inner(lr) == pytest.approx(1.0)
    assert lr.inner(ll) == pytest.approx(0.0)
    assert vacuum(walk_space).inner(lr) == 0


def test_apply_operator(walk_space):
    state = tensor_principal(basis_state(walk_space, "d", ["R"]), principal_basis_vector(walk_space, "0"))

    out = apply_operator(identity_operator(walk_space), state)

    assert out.inner(state) == pytest.approx(1.0)
    with pytest.raises(SpaceMismatchError):
        apply_operator(identity_operator(walk_space), basis_state(walk_space, "d", ["R"]))


# ----------------------------------------------------------------- identidades da segunda quantização
def _random_symmetric_state(space, rng, statistics, top):
    """Componentes aleatórias projetadas por S_v em todas as ocupações n ≤ top."""
    components = {}
    for occ in space.occupations:
        if occ["d"] > top:
            continue
        dims = space.dims(occ)
        size = int(np.prod(dims)) if dims else 1
        vec = rng.normal(size=size) + 1j * rng.normal(size=size)
        components[occ] = symmetric_projection(vec, dims, space.coin_axes(occ, "d"), statistics)
    return FockState(space, components, {"d": statistics})


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1), statistics=st.sampled_from([BOSON, FERMION]))
def test_creation_and_annihilation_are_adjoint(seed, statistics):
    """⟨a†(ψ)Φ|Θ⟩ = ⟨Φ|a(ψ)Θ⟩ abaixo da casca de truncamento."""
    space = FockSpace.build([SpaceSpec.coin("d", ["0", "1", "2"])], 3)
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    phi = _random_symmetric_state(space, rng, statistics, top=2)
    theta = _random_symmetric_state(space, rng, statistics, top=3)

    lhs = creation_op(psi, phi, "d").inner(theta)
    rhs = phi.inner(annihilation_op(psi, theta, "d"))

    assert abs(lhs - rhs) < 1e-10
