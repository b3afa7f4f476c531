import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // the acceptance test builds a 10-utterance corpus and shells out
    // to the analysis package for validation
    testTimeout: 180_000,
    hookTimeout: 180_000,
  },
});
