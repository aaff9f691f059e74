use super::{Ball, GameTuning, MatchState, Paddle, Side, Vec2};

/// Mirrors an unfolded coordinate back into `[0, 1]`. Returns the folded
/// value and whether an odd number of wall bounces happened.
pub fn fold_into_field(mut y: f64) -> (f64, bool) {
    let mut flipped = false;
    while !(0.0..=1.0).contains(&y) {
        y = if y > 1.0 { 2.0 - y } else { -y };
        flipped = !flipped;
    }
    (y, flipped)
}

/// Moves toward `target` (clamped to the legal paddle range) by at most
/// `max_speed * dt`.
pub fn move_paddle(paddle: &Paddle, target: f64, max_speed: f64, dt: f64) -> Paddle {
    debug_assert!(dt > 0.0);
    let lo = paddle.half_h;
    let hi = 1.0 - paddle.half_h;
    let target = target.clamp(lo, hi);
    let max_step = max_speed * dt;
    let delta = target - paddle.y;
    let y = if delta.abs() <= max_step {
        target
    } else {
        paddle.y + max_step.copysign(delta)
    };
    Paddle {
        y: y.clamp(lo, hi),
        ..*paddle
    }
}

/// Bounces the ball off a paddle face.
///
/// The outgoing angle from horizontal is proportional to where the ball met
/// the paddle: center hits leave flat, edge hits leave at the maximum
/// deflection. Each hit speeds the rally up, up to the cap.
pub fn reflect_off_paddle(
    ball: &Ball,
    paddle: &Paddle,
    rally_speed: f64,
    base_speed: f64,
    tuning: &GameTuning,
) -> (Ball, f64) {
    let offset = ((ball.pos.y - paddle.y) / paddle.half_h).clamp(-1.0, 1.0);
    let angle = offset * tuning.max_deflection_deg.to_radians();
    let speed = (rally_speed * tuning.hit_acceleration).min(tuning.max_speed_factor * base_speed);
    let out = Ball {
        pos: Vec2::new(tuning.face_x(paddle.side), ball.pos.y),
        vel: Vec2::new(
            paddle.side.outward() * speed * angle.cos(),
            speed * angle.sin(),
        ),
    };
    (out, speed)
}

/// Scoring side for a ball that left the field, if any.
pub fn detect_goal(state: &MatchState) -> Option<Side> {
    let x = state.ball.pos.x;
    if x < 0.0 {
        Some(Side::Right)
    } else if x > 1.0 {
        Some(Side::Left)
    } else {
        None
    }
}

/// Moves the ball one tick, resolving wall bounces and a paddle hit on the
/// swept segment so a fast ball cannot skip past a paddle between ticks.
pub(super) fn advance_ball(state: &mut MatchState, dt: f64) {
    let ball = state.ball;
    let x0 = ball.pos.x;
    let y0 = ball.pos.y;
    let x1 = x0 + ball.vel.x * dt;
    let y1 = y0 + ball.vel.y * dt;

    let facing = if ball.vel.x > 0.0 {
        Some(Side::Right)
    } else if ball.vel.x < 0.0 {
        Some(Side::Left)
    } else {
        None
    };
    if let Some(side) = facing {
        let face = state.tuning.face_x(side);
        let crosses = match side {
            Side::Right => x0 <= face && x1 > face,
            Side::Left => x0 >= face && x1 < face,
        };
        if crosses {
            let s = (face - x0) / (x1 - x0);
            let (y_hit, flipped) = fold_into_field(y0 + (y1 - y0) * s);
            let paddle = *state.paddle(side);
            if (y_hit - paddle.y).abs() <= paddle.half_h {
                let at_face = Ball {
                    pos: Vec2::new(face, y_hit),
                    vel: Vec2::new(
                        ball.vel.x,
                        if flipped { -ball.vel.y } else { ball.vel.y },
                    ),
                };
                let (out, speed) = reflect_off_paddle(
                    &at_face,
                    &paddle,
                    state.rally_speed,
                    state.base_speed(),
                    &state.tuning,
                );
                state.ball = out;
                state.rally_speed = speed;
                return;
            }
        }
    }

    let (y, flipped) = fold_into_field(y1);
    state.ball = Ball {
        pos: Vec2::new(x1, y),
        vel: Vec2::new(ball.vel.x, if flipped { -ball.vel.y } else { ball.vel.y }),
    };
}
