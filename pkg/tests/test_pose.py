import numpy as np
import pytest

from posecodes.errors import ConfigurationError, PoseError
from posecodes.pose import (
    KeypointRegistry,
    PoseKeypoints,
    default_registry,
    derive_auxiliary_keypoints,
    extended_registry,
    mirror_pose,
    mpje,
)
from posecodes.synthetic import random_pose, standing_pose


def set_joints(pose, **updates):
    coords = pose.coords.copy()
    for name, xyz in updates.items():
        coords[pose.registry.index(name)] = xyz
    return PoseKeypoints(coords, pose.registry)


class TestDeriveAuxiliaryKeypoints:
    def test_hand_is_wrist_phalanx_midpoint(self):
        pose = set_joints(
            standing_pose(), left_wrist=(0, 1, 0), left_middle2=(0.2, 1, 0)
        )
        extended = derive_auxiliary_keypoints(pose)
        assert np.allclose(extended["left_hand"], (0.1, 1, 0))

    def test_torso_is_mean_of_pelvis_neck_spine3(self):
        pose = set_joints(
            standing_pose(),
            pelvis=(0, 1, 0),
            neck=(0, 1.5, 0),
            spine3=(0, 1.2, 0),
        )
        extended = derive_auxiliary_keypoints(pose)
        assert np.allclose(extended["torso"], (0, 1.2333333333333334, 0))

    def test_original_coordinates_unchanged(self):
        pose = standing_pose()
        extended = derive_auxiliary_keypoints(pose)
        assert np.array_equal(extended.coords[: len(pose.registry)], pose.coords)
        assert extended.registry.names[-3:] == ("left_hand", "right_hand", "torso")

    def test_missing_source_keypoint_names_it(self):
        names = [n for n in default_registry().names if n != "spine3"]
        registry = KeypointRegistry(names)
        pose = PoseKeypoints(np.zeros((len(names), 3)), registry)
        with pytest.raises(ConfigurationError, match="spine3"):
            derive_auxiliary_keypoints(pose)

    def test_already_extended_registry_rejected(self):
        extended = derive_auxiliary_keypoints(standing_pose())
        with pytest.raises(ConfigurationError):
            derive_auxiliary_keypoints(extended)


class TestMpje:
    def test_identical_poses_have_zero_distance(self):
        pose = standing_pose()
        assert mpje(pose, pose) == 0.0

    def test_uniform_translation_gives_offset(self):
        a = standing_pose()
        b = PoseKeypoints(a.coords + np.array([1.0, 0.0, 0.0]), a.registry)
        assert mpje(a, b) == pytest.approx(1.0)

    def test_matches_per_joint_loop_oracle(self, rng):
        a = random_pose(rng)
        b = random_pose(rng)
        expected = np.mean(
            [np.sqrt(np.sum((pa - pb) ** 2)) for pa, pb in zip(a.coords, b.coords)]
        )
        assert mpje(a, b) == pytest.approx(expected, rel=1e-12)

    def test_registry_mismatch_rejected(self):
        a = standing_pose()
        small = KeypointRegistry(["pelvis"])
        b = PoseKeypoints(np.zeros((1, 3)), small)
        with pytest.raises(PoseError):
            mpje(a, b)

    def test_metric_properties_on_random_triples(self, rng):
        for _ in range(25):
            a, b, c = (random_pose(rng) for _ in range(3))
            assert mpje(a, b) >= 0
            assert mpje(a, b) == pytest.approx(mpje(b, a))
            assert mpje(a, c) <= mpje(a, b) + mpje(b, c) + 1e-12
        assert mpje(a, a) == 0.0


class TestMirrorPose:
    def test_symmetric_pose_is_fixed_point(self):
        pose = standing_pose()
        assert mirror_pose(pose) == pose

    def test_involution_is_bit_exact(self, rng):
        pose = random_pose(rng)
        back = mirror_pose(mirror_pose(pose))
        assert back.coords.tobytes() == pose.coords.tobytes()

    def test_left_hand_maps_to_right_hand(self, rng):
        pose = derive_auxiliary_keypoints(random_pose(rng))
        pose = set_joints(pose, left_hand=(0.3, 1, 0))
        mirrored = mirror_pose(pose)
        assert np.array_equal(mirrored["right_hand"], (-0.3, 1, 0))

    def test_commutes_with_auxiliary_derivation(self, rng):
        pose = random_pose(rng)
        a = derive_auxiliary_keypoints(mirror_pose(pose))
        b = mirror_pose(derive_auxiliary_keypoints(pose))
        assert a.coords.tobytes() == b.coords.tobytes()

    def test_unpaired_sided_keypoint_rejected(self):
        registry = KeypointRegistry(["pelvis", "left_hip"])
        pose = PoseKeypoints(np.zeros((2, 3)), registry)
        with pytest.raises(ConfigurationError, match="right_hip"):
            mirror_pose(pose)


def test_registries_are_consistent():
    assert len(default_registry()) == 52
    assert len(extended_registry()) == 55
    perm = extended_registry().mirror_indices()
    assert np.array_equal(perm[perm], np.arange(55))


def test_pose_rejects_non_finite_coordinates():
    coords = np.zeros((52, 3))
    coords[3, 1] = np.nan
    with pytest.raises(PoseError):
        PoseKeypoints(coords, default_registry())
