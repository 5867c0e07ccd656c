from rectiforge import RectiForge, load_params

params = load_params()

# Make changes to the params if needed
params["hb"]["harmonics"] = 10

model1 = RectiForge("dualband_rectifier", params)
model1.solve(95e6, -10)
model1.sweep("pin", [-30, -20, -10, 0], {"freq": 95e6})
model1.save("run1")
