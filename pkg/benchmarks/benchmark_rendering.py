import timeit
import numpy as np
from sheartac.contact import SensorGeometry, ContactRanges, render_depth, sample_contact
from sheartac.dataset import default_objects
from sheartac.sensor import MarkerGridConfig, MembraneParams, real_tactile_oracle, sim_tactile_image
from sheartac.pose import shear_to_sensor_frame

iterations = 100
geom = SensorGeometry()
grid = MarkerGridConfig().build(geom)
params = MembraneParams()
objects = default_objects()
contacts = []
for i in range(iterations):
    obj = objects[i % len(objects)]
    anchor, pose, label = sample_contact(
        obj.shape, ContactRanges(), i, geom, obj.contact_type)
    depth = render_depth(pose, obj.shape, geom)
    contacts.append((obj.shape, pose, depth, shear_to_sensor_frame(label.shear, "vertical")))


def benchmark_render_depth():
    for shape, pose, _, _ in contacts:
        render_depth(pose, shape, geom)


def benchmark_sim_image():
    for _, _, depth, _ in contacts:
        sim_tactile_image(depth)


def benchmark_oracle():
    for _, _, depth, shear in contacts:
        real_tactile_oracle(depth, shear, grid, params, geom)


for name, benchmark in [("render_depth", benchmark_render_depth),
                        ("sim_tactile_image", benchmark_sim_image),
                        ("real_tactile_oracle", benchmark_oracle)]:
    times = timeit.repeat(benchmark, repeat=5, number=1)
    print(f"{name} Mean: {np.mean(times):.5f}; Std. dev.: {np.std(times):.5f}")
