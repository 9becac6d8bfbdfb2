from hypothesis import settings

# first touches of a lazy word pay for materializing it; timings are not the point here
settings.register_profile("repo", deadline=None)
settings.load_profile("repo")
