from hypothesis import settings

# first calls into numba kernels include compilation time
settings.register_profile("cocyclelab", deadline=None)
settings.load_profile("cocyclelab")
