import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from spheroidal_eq import ParticleFlow, SpheroidalEquilibrium, SpheroidShapeEstimator
from spheroidal_eq.exceptions import DomainError
from spheroidal_eq.sampling import stream, uniform_spheroid


def test_equilibrium_params_and_clone():
    est = SpheroidalEquilibrium(n=4, alpha=0.5)
    assert est.get_params() == {"n": 4, "alpha": 0.5}
    c = clone(est).set_params(alpha=1.0)
    assert c.alpha == 1.0 and est.alpha == 0.5


def test_equilibrium_fit_predict():
    est = SpheroidalEquilibrium(alpha=1.0).fit()
    assert est.t_ == pytest.approx(0.1351824230876278, rel=1e-11)
    x = uniform_spheroid(stream(0), 50, est.a_, est.b_, 3)
    eff = est.effective_potential(x)
    assert np.allclose(eff, est.c_alpha_, rtol=1e-9)
    assert est.score(x) > -1e-9
    comps = est.transform(x)
    assert comps.shape == (50, 2)
    assert np.allclose(comps[:, 0] + 1.0 * comps[:, 1], est.predict(x), rtol=1e-12)
    assert est.verify(n_z=50).passed()


def test_equilibrium_errors():
    with pytest.raises(NotFittedError):
        SpheroidalEquilibrium().predict(np.zeros((1, 3)))
    with pytest.raises(DomainError):
        SpheroidalEquilibrium(alpha=2.0).fit()
    est = SpheroidalEquilibrium().fit()
    with pytest.raises(DomainError):
        est.predict(np.zeros((2, 4)))


def test_shape_estimator():
    x = uniform_spheroid(stream(1), 100_000, 0.5, 1.0, 3)
    est = SpheroidShapeEstimator().fit(x)
    assert est.t_hat_ == pytest.approx(0.25, rel=2e-2)
    u = est.transform(x)
    assert np.mean(np.sum(u * u, axis=1) <= 1.0) > 0.95
    assert est.predict(np.array([[0.0, 0.0, 0.0], [0.0, 3.0, 0.0]])).tolist() == [True, False]
    with pytest.raises(DomainError):
        est.fit(np.zeros((2, 3)))
    with pytest.raises(DomainError):
        est.fit([[np.nan, 1, 2]] * 5)


def test_particle_flow_estimator():
    est = ParticleFlow(n_particles=60, alpha=-0.4, max_iter=400, seed=3)
    pts = est.fit_transform()
    assert pts.shape == (60, 3)
    assert est.n_iter_ <= 400
    assert np.all(np.diff(est.energies_) <= 0)
    assert est.shape_.t_hat > 1
    # explicit start configuration
    start = np.random.default_rng(0).normal(size=(10, 3))
    est2 = ParticleFlow(max_iter=10).fit(start)
    assert est2.points_.shape == (10, 3)
    with pytest.raises(DomainError):
        ParticleFlow(step=-1.0).fit()
    with pytest.raises(DomainError):
        ParticleFlow(n_particles=0).fit()
