/* Computes the synthetic preset's trajectory and prints the last instant. */
#include <stdio.h>
#include "temporank.h"

int main(void) {
    TrNetwork *net = NULL;
    TrTrajectory *traj = NULL;
    TrOptions opts = tr_options_default();
    double scores[5];
    size_t len = 0;

    if (tr_network_preset("paper-synthetic", &net) != TR_STATUS_OK) {
        fprintf(stderr, "%s\n", tr_last_error_message());
        return 1;
    }
    opts.grid_points = 11;
    if (tr_trajectory_compute(net, &opts, &traj) != TR_STATUS_OK) {
        fprintf(stderr, "%s\n", tr_last_error_message());
        tr_network_free(net);
        return 1;
    }
    tr_trajectory_len(traj, &len);
    tr_trajectory_scores(traj, len - 1, scores, 5);
    for (int i = 0; i < 5; i++) {
        printf("%.12f\n", scores[i]);
    }
    if (tr_network_load("/nonexistent", &net) != TR_STATUS_NOT_FOUND) {
        return 1;
    }
    tr_trajectory_free(traj);
    tr_network_free(net);
    return 0;
}
