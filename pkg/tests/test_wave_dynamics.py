"""
Unit tests for Wave Dynamics Module.
Tests split-step evolution against analytic solutions, the eigensolver,
tunneling, occupancy, charge tracking and snapshot files.
"""

import math

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from potential_landscape import DoubleWellParams, double_well_on_grid
from wave_dynamics import (
    ChargeVerdict, DerivativeScheme, EvolutionConfig, EvolutionError, Grid, GridError,
    ObservableSeries, SnapshotError, SplitStepPropagator, TunnelingError, WaveField,
    charge_conservation_report, evolve, field_energy, gaussian_packet, load_snapshot,
    packet_width, partial_derivative, read_grid_array, save_snapshot, sech_profile,
    stationary_states, tunneling_period, tunneling_splitting, well_occupancy,
    write_grid_array,
)


@pytest.fixture
def line():
    return Grid((40.0,), (512,))


def soliton_error(dt, t_end, grid):
    steps = int(round(t_end / dt))
    final, _ = evolve(sech_profile(grid), EvolutionConfig(dt=dt, steps=steps, gamma=-1.0,
                                                          record_every=steps))
    exact = np.exp(0.5j * final.time) / np.cosh(grid.axis(0))
    return float(np.max(np.abs(final.samples - exact)))


class TestGrid:
    """Test suite for Grid."""

    def test_periodic_axis(self):
        """Test the axis starts at -L/2 and excludes the right endpoint."""
        grid = Grid((4.0,), (8,))

        assert grid.axis(0)[0] == -2.0
        assert grid.axis(0)[-1] == pytest.approx(1.5)
        assert grid.spacing == (0.5,)

    def test_two_dimensional(self):
        """Test shape, size and cell volume in 2D."""
        grid = Grid((10.0, 4.0), (20, 8))

        assert grid.shape == (20, 8)
        assert grid.size == 160
        assert grid.cell_volume == pytest.approx(0.25)

    def test_point_cap(self):
        """Test multi-dimensional grids are capped per axis."""
        with pytest.raises(GridError):
            Grid((10.0, 10.0), (512, 8))

    def test_invalid(self):
        """Test bad extents and counts."""
        with pytest.raises(GridError):
            Grid((0.0,), (16,))
        with pytest.raises(GridError):
            Grid((1.0,), (1,))
        with pytest.raises(GridError):
            Grid((1.0, 1.0, 1.0, 1.0), (4, 4, 4, 4))

    def test_spectral_derivative(self):
        """Test the spectral derivative of a resolved sine is exact."""
        grid = Grid((2 * math.pi,), (32,))
        x = grid.axis(0)

        derivative = partial_derivative(np.sin(3 * x), grid, 0)

        np.testing.assert_allclose(derivative.real, 3 * np.cos(3 * x), atol=1e-12)

    def test_central_derivative(self):
        """Test the central difference is second-order accurate."""
        grid = Grid((2 * math.pi,), (256,))
        x = grid.axis(0)

        derivative = partial_derivative(np.sin(x), grid, 0, DerivativeScheme.CENTRAL)

        h = grid.spacing[0]
        np.testing.assert_allclose(derivative.real, np.cos(x), atol=h * h)


class TestWaveField:
    """Test suite for WaveField."""

    def test_sample_mismatch(self, line):
        """Test sample count must match the grid."""
        with pytest.raises(GridError):
            WaveField(line, np.ones(10))

    def test_non_finite(self, line):
        """Test NaN samples are rejected."""
        samples = np.ones(512, dtype=complex)
        samples[3] = np.nan

        with pytest.raises(EvolutionError):
            WaveField(line, samples)

    def test_zero_norm(self, line):
        """Test an all-zero field is rejected."""
        with pytest.raises(EvolutionError):
            WaveField(line, np.zeros(512))

    def test_gaussian_normalized(self, line):
        """Test gaussian_packet has unit norm and the requested width."""
        packet = gaussian_packet(line, [1.0], 0.8)

        assert packet.norm() == pytest.approx(1.0, abs=1e-12)
        assert packet_width(packet) == pytest.approx(0.8, rel=1e-6)
        assert packet.mean_position()[0] == pytest.approx(1.0, abs=1e-10)


class TestEvolve:
    """Test suite for split-step evolution."""

    def test_zero_steps(self, line):
        """Test steps = 0 returns the field unchanged with one record."""
        field = gaussian_packet(line, [0.0], 1.0)

        final, series = evolve(field, EvolutionConfig(dt=1e-3, steps=0))

        assert final is field
        assert len(series) == 1
        assert series.times == [0.0]

    def test_free_packet_spreading(self, line):
        """Test free Gaussian width against sigma0 sqrt(1 + (t / (2 sigma0^2))^2)."""
        field = gaussian_packet(line, [0.0], 1.0)

        final, series = evolve(field, EvolutionConfig(dt=1e-3, steps=2000, record_every=500))

        expected = math.sqrt(1.0 + (final.time / 2.0) ** 2)
        assert final.time == pytest.approx(2.0)
        assert packet_width(final) == pytest.approx(expected, rel=5e-3)
        assert series.times == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0])

    def test_free_packet_charge_conserved(self, line):
        """Test the free run conserves norm to round-off."""
        field = gaussian_packet(line, [0.0], 1.0)
        _, series = evolve(field, EvolutionConfig(dt=1e-3, steps=2000, record_every=100))

        report = charge_conservation_report(series, 1e-6)

        assert report.verdict is ChargeVerdict.CONSERVED
        assert report.max_relative_drift < 1e-8
        assert report.offending_index is None

    def test_bright_soliton(self, line):
        """Test sech(x) stays a soliton for gamma = -1 up to t = 10."""
        field = sech_profile(line)

        final, series = evolve(field, EvolutionConfig(dt=1e-3, steps=10000, gamma=-1.0,
                                                      record_every=1000))

        deviation = np.max(np.abs(np.abs(final.samples) - 1.0 / np.cosh(line.axis(0))))
        assert deviation < 1e-3
        assert charge_conservation_report(series, 1e-6).max_relative_drift < 1e-7
        energies = np.asarray(series.energy)
        assert energies[0] == pytest.approx(-1.0 / 3.0, rel=1e-6)
        assert np.max(np.abs(energies - energies[0])) / abs(energies[0]) < 1e-4

    def test_second_order_convergence(self, line):
        """Test halving dt cuts the soliton error by about four."""
        coarse = soliton_error(0.02, 2.0, line)
        fine = soliton_error(0.01, 2.0, line)

        assert 3.0 <= coarse / fine <= 5.0

    def test_norm_with_potential(self, line):
        """Test norm conservation over 10,000 steps in a harmonic trap."""
        field = gaussian_packet(line, [1.0], 1.0, momentum=[0.5])
        potential = 0.5 * line.axis(0) ** 2

        _, series = evolve(field, EvolutionConfig(dt=1e-3, steps=10000, potential=potential,
                                                  record_every=2500))

        assert charge_conservation_report(series, 1e-8).verdict is ChargeVerdict.CONSERVED

    def test_two_dimensional_drift(self):
        """Test a 2D packet moves at its momentum."""
        grid = Grid((20.0, 20.0), (64, 64))
        field = gaussian_packet(grid, [-2.0, 0.0], 1.0, momentum=[1.0, 0.0])

        final, series = evolve(field, EvolutionConfig(dt=1e-2, steps=100, record_every=50))

        assert final.mean_position()[0] == pytest.approx(-1.0, abs=1e-6)
        assert final.mean_position()[1] == pytest.approx(0.0, abs=1e-10)
        assert series.csv_header() == ["time", "norm", "energy", "mean_x", "mean_y", "p_left", "p_right"]
        assert list(series.to_rows())[0][-2:] == [None, None]

    def test_occupancy_tracked(self, line):
        """Test occupancy columns are filled when a split is given."""
        field = gaussian_packet(line, [-5.0], 0.5)

        _, series = evolve(field, EvolutionConfig(dt=1e-3, steps=10, record_every=5, occupancy_split=0.0))

        p_left, p_right = series.well_occupancy
        assert len(p_left) == 3
        assert p_left[0] == pytest.approx(1.0, abs=1e-10)
        assert p_left[-1] + p_right[-1] == pytest.approx(1.0, abs=1e-12)

    def test_keep_snapshots(self, line):
        """Test recorded fields are kept on request."""
        field = gaussian_packet(line, [0.0], 1.0)

        _, series = evolve(field, EvolutionConfig(dt=1e-3, steps=4, record_every=2, keep_snapshots=True))

        assert [s.time for s in series.snapshots] == pytest.approx([0.0, 0.002, 0.004])

    def test_potential_shape_mismatch(self, line):
        """Test a potential on the wrong grid."""
        field = gaussian_packet(line, [0.0], 1.0)

        with pytest.raises(GridError):
            evolve(field, EvolutionConfig(dt=1e-3, steps=1, potential=np.zeros(100)))

    def test_three_dimensional_rejected(self):
        """Test evolution refuses 3D grids."""
        with pytest.raises(GridError):
            SplitStepPropagator(Grid((4.0, 4.0, 4.0), (8, 8, 8)), 1e-3)

    def test_invalid_config(self):
        """Test non-positive dt and stride."""
        with pytest.raises(EvolutionError):
            EvolutionConfig(dt=0.0, steps=1)
        with pytest.raises(EvolutionError):
            EvolutionConfig(dt=1e-3, steps=1, record_every=0)
        with pytest.raises(EvolutionError):
            EvolutionConfig(dt=1e-3, steps=-1)


class TestStationaryStates:
    """Test suite for the finite-difference eigensolver."""

    def test_harmonic_spectrum(self):
        """Test the oscillator levels 0.5, 1.5, 2.5, 3.5."""
        grid = Grid((20.0,), (1024,))

        states = stationary_states(0.5 * grid.axis(0) ** 2, grid, 4)

        energies = [e for e, _ in states]
        assert energies == pytest.approx([0.5, 1.5, 2.5, 3.5], abs=1e-3)
        for _, vec in states:
            assert np.sum(vec ** 2) * grid.spacing[0] == pytest.approx(1.0, abs=1e-12)

    def test_double_well_parity(self):
        """Test the ground state is even and the first excited state odd."""
        grid = Grid((12.0,), (512,))
        potential = double_well_on_grid(DoubleWellParams(1.0, 1.5), grid)

        (_, ground), (_, excited) = stationary_states(potential, grid, 2)

        mirror = (-np.arange(512)) % 512
        np.testing.assert_allclose(ground[mirror], ground, atol=1e-8)
        np.testing.assert_allclose(excited[mirror], -excited, atol=1e-8)

    def test_free_ground_state(self):
        """Test a flat potential gives E0 = 0 with a uniform state."""
        grid = Grid((10.0,), (128,))

        ((energy, vec),) = stationary_states(np.zeros(128), grid, 1)

        assert energy == pytest.approx(0.0, abs=1e-8)
        np.testing.assert_allclose(vec, 1.0 / math.sqrt(10.0), atol=1e-8)

    def test_k_out_of_range(self):
        """Test k must be at least 1 and well below the grid size."""
        grid = Grid((10.0,), (16,))

        with pytest.raises(EvolutionError):
            stationary_states(np.zeros(16), grid, 0)
        with pytest.raises(EvolutionError):
            stationary_states(np.zeros(16), grid, 15)


class TestTunneling:
    """Test suite for tunneling measurements."""

    @pytest.fixture
    def grid(self):
        return Grid((12.0,), (512,))

    def test_measured_matches_spectral(self, grid):
        """Test the time-domain tunneling time is within 2% of pi / delta_E."""
        result = tunneling_period(DoubleWellParams(1.0, 1.5), grid, dt=2e-3)

        assert result.relative_difference < 0.02
        assert result.t_spectral == pytest.approx(math.pi / result.splitting)
        assert result.to_dict()["T_measured"] == result.t_measured

    def test_deeper_wells_tunnel_slower(self, grid):
        """Test a larger well separation gives a longer tunneling time."""
        _, shallow, _ = tunneling_splitting(DoubleWellParams(1.0, 1.5), grid)
        _, deep, _ = tunneling_splitting(DoubleWellParams(1.0, 2.0), grid)

        assert deep > shallow

    def test_symmetric_start_has_no_period(self, grid):
        """Test the even ground state never oscillates between wells."""
        params = DoubleWellParams(1.0, 1.5)
        with pytest.raises(TunnelingError):
            tunneling_period(params, grid, dt=2e-3, max_steps=2000, initial="symmetric")

        _, _, states = tunneling_splitting(params, grid)
        psi = states[0][1].astype(np.complex128)
        propagator = SplitStepPropagator(grid, 2e-3, 0.0, double_well_on_grid(params, grid))
        for _ in range(2000):
            psi = propagator.step(psi)
            p_left, _ = well_occupancy(WaveField(grid, psi), 0.0)
            assert p_left == pytest.approx(0.5, abs=1e-6)

    def test_above_barrier(self, grid):
        """Test a shallow well is not a tunneling regime."""
        with pytest.raises(TunnelingError):
            tunneling_splitting(DoubleWellParams(0.1, 0.5), grid)


class TestWellOccupancy:
    """Test suite for well_occupancy."""

    def test_fully_left(self, line):
        """Test a packet left of the split."""
        p_left, p_right = well_occupancy(gaussian_packet(line, [-5.0], 0.5), 0.0)

        assert p_left == pytest.approx(1.0, abs=1e-10)
        assert p_right == pytest.approx(0.0, abs=1e-10)

    def test_mirror_symmetric(self, line):
        """Test a centered packet splits evenly."""
        p_left, p_right = well_occupancy(gaussian_packet(line, [0.0], 1.0), 0.0)

        assert p_left == pytest.approx(0.5, abs=1e-10)
        assert p_right == pytest.approx(0.5, abs=1e-10)

    def test_random_field(self, line):
        """Test against a masked sum."""
        rng = np.random.default_rng(12)
        field = WaveField(line, rng.normal(size=512) + 1j * rng.normal(size=512))

        p_left, p_right = well_occupancy(field, 3.3)

        rho = field.density()
        expected = np.sum(rho[line.axis(0) < 3.3]) / np.sum(rho)
        assert p_left == pytest.approx(expected, abs=1e-12)
        assert p_left + p_right == pytest.approx(1.0, abs=1e-12)

    def test_needs_1d(self):
        """Test a 2D field is rejected."""
        grid = Grid((4.0, 4.0), (8, 8))

        with pytest.raises(GridError):
            well_occupancy(gaussian_packet(grid, [0.0, 0.0], 1.0), 0.0)


class TestChargeReport:
    """Test suite for charge_conservation_report."""

    def make_series(self, norms):
        n = len(norms)
        return ObservableSeries(times=list(range(n)), norm=norms, energy=[0.0] * n,
                                mean_position=[[0.0] * n])

    def test_injected_drop(self):
        """Test a 1% drop is flagged at its index."""
        report = charge_conservation_report(self.make_series([1.0, 1.0, 0.99, 1.0]), 1e-6)

        assert report.verdict is ChargeVerdict.VIOLATED
        assert report.offending_index == 2
        assert report.max_relative_drift == pytest.approx(0.01)
        assert report.to_dict()["verdict"] == "violated"

    def test_single_entry(self):
        """Test one record is trivially conserved."""
        report = charge_conservation_report(self.make_series([2.5]), 1e-6)

        assert report.verdict is ChargeVerdict.CONSERVED
        assert report.max_relative_drift == 0.0

    def test_unequal_lengths(self):
        """Test the series rejects ragged lists."""
        with pytest.raises(EvolutionError):
            ObservableSeries(times=[0.0, 1.0], norm=[1.0], energy=[0.0, 0.0], mean_position=[[0.0, 0.0]])


class TestSnapshots:
    """Test suite for field snapshot files."""

    def test_save_and_load(self, tmp_path):
        """Test a 2D snapshot reads back bit-identically."""
        grid = Grid((6.0, 4.0), (12, 8))
        rng = np.random.default_rng(13)
        field = WaveField(grid, rng.normal(size=(12, 8)) + 1j * rng.normal(size=(12, 8)), time=1.25)

        header_path, data_path = save_snapshot(field, str(tmp_path / "snap"))
        loaded = load_snapshot(str(tmp_path / "snap"))

        assert os.path.getsize(data_path) == 12 * 8 * 16
        assert loaded.grid == grid
        assert loaded.time == 1.25
        assert np.array_equal(loaded.samples, field.samples)

    def test_header_fields(self, tmp_path):
        """Test the JSON sidecar carries the grid description."""
        grid = Grid((4.0,), (8,))
        write_grid_array(str(tmp_path / "a"), grid, np.ones(8), time=0.5, extra={"component": "x"})

        _, samples, header = read_grid_array(str(tmp_path / "a"))

        assert header["dims"] == 1
        assert header["counts"] == [8]
        assert header["component"] == "x"
        assert np.array_equal(samples, np.ones(8, dtype=complex))

    def test_truncated_data(self, tmp_path):
        """Test a short binary file is rejected."""
        stem = str(tmp_path / "b")
        write_grid_array(stem, Grid((4.0,), (8,)), np.ones(8))
        with open(f"{stem}.bin", "r+b") as f:
            f.truncate(40)

        with pytest.raises(SnapshotError):
            load_snapshot(stem)

    def test_missing_files(self, tmp_path):
        """Test a missing snapshot."""
        with pytest.raises(SnapshotError):
            load_snapshot(str(tmp_path / "nothing"))
