import numpy as np
import pytest
import torch

from agmrf import autodiff as ad
from agmrf.agm import (
    AgmConfig,
    critic_loss,
    critic_step,
    generate_fake_batch,
    generator_loss,
    generator_step,
    init_state,
    train_agm,
)
from agmrf.bp import inference
from agmrf.data import Dataset
from agmrf.ensemble import sample_members
from agmrf.errors import ConfigError, StructureError
from agmrf.graph import GraphStructure, make_random_structure
from agmrf.nets import Discriminator, Learner
from oracles import central_diff, rel_err


def zero_(module):
    with torch.no_grad():
        for p in module.parameters():
            p.zero_()
    return module


def snapshot(module):
    return {k: v.clone() for k, v in module.state_dict().items()}


def same(a, b):
    return all(torch.equal(a[k], b[k]) for k in a)


def test_zero_learner_gives_uniform_blocks():
    s = make_random_structure(6, 1.5, seed=0, support_size=3)
    fake = generate_fake_batch(zero_(Learner(4, s.n_params)), s, 5, 5, torch.Generator().manual_seed(0))
    torch.testing.assert_close(fake, torch.full((5, 18), 1 / 3, dtype=ad.DTYPE))


def test_fake_width_and_block_sums():
    s = make_random_structure(16, 5.0, seed=1)
    gen = torch.Generator().manual_seed(1)
    for trial in range(100):
        learner = Learner(8, s.n_params, seed=trial)
        fake = generate_fake_batch(learner, s, 4, 5, gen)
        assert fake.shape == (4, 32)
        torch.testing.assert_close(fake.reshape(4, 16, 2).sum(-1), torch.ones(4, 16, dtype=ad.DTYPE), rtol=0, atol=1e-9)


def test_zero_penalty_weight_and_zero_critic():
    disc = zero_(Discriminator(6))
    real, fake = torch.rand(4, 6, dtype=ad.DTYPE), torch.rand(4, 6, dtype=ad.DTYPE)
    masks = tuple(disc.sample_masks(4, torch.Generator().manual_seed(2)) for _ in range(3))
    loss, _ = critic_loss(disc, real, fake, torch.rand(4, 1, dtype=ad.DTYPE), masks, lam=0.0)
    loss.backward()
    assert loss.item() == 0.0
    assert all(torch.all(p.grad == 0) for p in disc.parameters())


def test_linear_critic_penalty_is_constant():
    a = torch.tensor([0.3, -1.1, 0.7, 2.0], dtype=ad.DTYPE)
    expected = (a.norm().item() - 1) ** 2
    rng = np.random.default_rng(3)
    for _ in range(5):
        real, fake = ad.tensor(rng.random((6, 4))), ad.tensor(rng.random((6, 4)))
        mix = ad.tensor(rng.random((6, 1)))
        interp = mix * real + (1 - mix) * fake
        assert ad.gradient_penalty(lambda x: x @ a, interp).item() == pytest.approx(expected, rel=1e-12)


def test_critic_step_decreases_loss_on_fixed_batch():
    s = make_random_structure(5, 1.0, seed=4)
    state = init_state(s, AgmConfig(latent_dim=8, seed=4, learning_rate=1e-3))
    gen = torch.Generator().manual_seed(4)
    real = torch.as_tensor(np.eye(2)[np.random.default_rng(4).integers(0, 2, size=(32, 5))].reshape(32, 10))
    fake = generate_fake_batch(state.learner, s, 32, 5, gen)
    mix = torch.rand((32, 1), generator=gen, dtype=ad.DTYPE)
    masks = tuple(state.disc.sample_masks(32, gen) for _ in range(3))
    theta = snapshot(state.learner)
    before, _ = critic_loss(state.disc, real, fake, mix, masks, 10.0)
    state.opt_disc.zero_grad()
    before.backward()
    state.opt_disc.step()
    after, _ = critic_loss(state.disc, real, fake, mix, masks, 10.0)
    assert after.item() < before.item()
    assert same(theta, snapshot(state.learner))


def test_critic_step_leaves_learner_untouched():
    s = make_random_structure(5, 1.0, seed=5)
    cfg = AgmConfig(latent_dim=8, batch_size=16, seed=5)
    state = init_state(s, cfg)
    theta = {k: v for k, v in snapshot(state.learner).items() if "running" not in k and "num_batches" not in k}
    critic_step(state, torch.rand(16, 10, dtype=ad.DTYPE), s, cfg)
    after = snapshot(state.learner)
    assert all(torch.equal(theta[k], after[k]) for k in theta)


def test_generator_step_isolation_and_zero_critic():
    s = make_random_structure(5, 1.0, seed=6)
    cfg = AgmConfig(latent_dim=8, batch_size=16, seed=6)
    state = init_state(s, cfg)
    w = snapshot(state.disc)
    generator_step(state, s, cfg)
    assert same(w, snapshot(state.disc))
    assert all(p.requires_grad for p in state.disc.parameters())
    zero_(state.disc)
    state.opt_learner.zero_grad()
    z = torch.randn(16, 8, dtype=ad.DTYPE)
    generator_loss(state.learner, state.disc, s, z, 5, state.disc.sample_masks(16, state.gen)).backward()
    assert all(p.grad is None or torch.all(p.grad == 0) for p in state.learner.parameters())


def test_generator_gradient_matches_finite_differences():
    s = GraphStructure(3, 2, ((0, 1), (1, 2)))
    learner, disc = Learner(4, s.n_params, seed=7), Discriminator(6, seed=8)
    gen = torch.Generator().manual_seed(7)
    z = torch.randn(8, 4, generator=gen, dtype=ad.DTYPE)
    masks = disc.sample_masks(8, gen)
    w0 = learner.fc2.weight.detach().numpy().copy()

    def loss_at(w):
        with torch.no_grad():
            learner.fc2.weight.copy_(torch.as_tensor(w))
        return generator_loss(learner, disc, s, z, 2, masks).item()

    learner.zero_grad()
    generator_loss(learner, disc, s, z, 2, masks).backward()
    g = learner.fc2.weight.grad.numpy().copy()
    assert rel_err(g, central_diff(loss_at, w0)) < 1e-3


def test_toy_training_concentrates_mass():
    s = GraphStructure(2, 2, ((0, 1),))
    data = Dataset(np.zeros((256, 2), dtype=np.int64), 2)
    state = train_agm(data, s, AgmConfig(total_generator_steps=500, seed=9))
    members = sample_members(state.learner, 20, torch.Generator().manual_seed(9))
    for psi in members:
        beliefs = inference(s, psi, t=5)
        assert np.all(beliefs[:, 0] >= 0.9)
    assert np.all(np.isfinite(np.array(state.history)))


def test_determinism_and_checkpoints():
    s = make_random_structure(4, 1.0, seed=10)
    data = np.random.default_rng(10).integers(0, 2, size=(30, 4))
    cfg = AgmConfig(critic_steps=2, batch_size=8, total_generator_steps=3, latent_dim=4, seed=10)
    seen = []
    a = train_agm(data, s, cfg, on_checkpoint=lambda st: seen.append(st.step))
    b = train_agm(data, s, cfg)
    assert a.history == b.history and seen == [3]


def test_validation():
    with pytest.raises(ConfigError):
        AgmConfig(critic_steps=0)
    with pytest.raises(ConfigError):
        AgmConfig(lam=-1.0)
    s = make_random_structure(4, 1.0, seed=11)
    with pytest.raises(StructureError):
        train_agm(np.zeros((4, 5), dtype=int), s, AgmConfig(total_generator_steps=1))
